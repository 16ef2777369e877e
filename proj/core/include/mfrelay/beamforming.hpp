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

#include <stdexcept>
#include <string>

#include "mfrelay/channel.hpp"

namespace mfrelay {

/// Quadrature failed to reach its tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved)
    {
    }
    double achieved_tolerance() const { return achieved_; }

private:
    double achieved_;
};

/// f has the same sign at both ends of the requested bracket.
class NoSignChange : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data of the rank-one optimality test for Rayleigh h_F:
///   d1 = (alpha gamma + 1 + gamma ||mu||^2) / G
///   d2 = d1 / (alpha gamma + 1) * [1 - (gamma ||mu||^2 / G) exp(d1) Gamma(0, d1)]
struct BeamformingInstance {
    ChannelMeanModel model;
    LinkParams params;
    double d1;
    double d2;
};

/// Requires alpha > 0 (std::invalid_argument otherwise).
BeamformingInstance make_bf_instance(const ChannelMeanModel& model, const LinkParams& params);

/// Density of Z on (0, d1]:
///   p(z) = d1/(alpha gamma z^2) exp{-[||mu||^2/alpha + (d1/z - 1)/(alpha gamma)]}
///          I0(2 ||mu|| sqrt(d1/z - 1) / (alpha sqrt(gamma)))
/// evaluated with the scaled Bessel function. Throws std::domain_error outside (0, d1].
double pz_density(double z, const BeamformingInstance& inst);

struct BfExpectations {
    double mass = 0.0;     ///< integral of p_Z, should be 1
    double e_z = 0.0;      ///< E{Z}
    double e_z_expg = 0.0; ///< E{Z e^Z Gamma(0, Z)}
    double e_z2_expg = 0.0; ///< E{Z^2 e^Z Gamma(0, Z)}
    double max_rel_error = 0.0;
};

/// Adaptive Gauss-Kronrod over (0, d1], split at d1/10 with the lower piece mapped by u = 1/z.
/// Throws QuadratureError if any relative error estimate exceeds 1e-6.
BfExpectations bf_expectations(const BeamformingInstance& inst);

/// E{Z} + E{Z e^Z Gamma(0,Z)}/G - E{Z^2 e^Z Gamma(0,Z)} - d2. Beamforming along mu achieves
/// capacity iff this is <= 0.
double f_gamma(double gamma, const ChannelMeanModel& model, double g_relay);

struct GammaBracket {
    double lo = 1e-2;
    double hi = 1e2;
};

/// Root of f over gamma by bisection in log(gamma); beamforming is optimal below it.
/// Throws NoSignChange when f keeps one sign on the bracket.
double bf_threshold(const ChannelMeanModel& model, double g_relay, const GammaBracket& bracket = {});

} // namespace mfrelay
