// SPDX-License-Identifier: Apache-2.0
//
// mfrelay: source covariance optimization for amplify-and-forward MISO relaying
// Copyright (C) 2026 The mfrelay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <vector>

#include "mfrelay/rng.hpp"

namespace mfrelay {

/// exp(-x) I0(x) for x >= 0. Power series up to x = 20, Hankel asymptotic series beyond.
double bessel_i0_scaled(double x);

/// Gamma(0, x) = E1(x) for x > 0. Underflows to zero past x ~ 745; use expx_gamma0 there.
double gamma0(double x);

/// exp(x) Gamma(0, x) for x > 0 without forming either factor. Strictly decreasing, below 1/x.
double expx_gamma0(double x);

/// |g + sqrt(c)|^2 with g ~ CN(0, 1): noncentral chi-square with two degrees of freedom in the
/// unit-variance normalization, mean 1 + c, variance 1 + 2c.
double sample_ncx2(double noncentrality, Rng& rng);

/// Noncentral chi-square(2) density, same normalization as sample_ncx2:
/// exp(-(x + c)) I0(2 sqrt(c x)).
double ncx2_density(double x, double noncentrality);

/// W = sum_i weights[i] X_i with X_i independent noncentral chi-square(2), noncentrality c_i.
struct MixtureSpec {
    std::vector<double> weights;
    std::vector<double> noncentralities;

    /// Throws std::invalid_argument if lengths differ, entries are negative or weights do not sum to 1.
    void validate() const;
    double mean() const;
};

/// log E[exp(-s W)] = -sum_i [log(1 + w_i s) + w_i c_i s / (1 + w_i s)]. Throws for s <= 0.
double log_mgf_mixture(const MixtureSpec& spec, double s);
double mgf_mixture(const MixtureSpec& spec, double s);

/// One draw of W.
double sample_mixture(const MixtureSpec& spec, Rng& rng);

} // namespace mfrelay
