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

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mfrelay/channel.hpp"
#include "mfrelay/specfun.hpp"

namespace mfrelay {

/// Threshold on the log-MGF ratio above which the Laplace transform order counts as violated.
inline constexpr double kLtViolationTol = 1e-10;

/// Comparison of an arbitrary covariance Q1 = U diag(lambda) U^H against the mean-aligned
/// family Q2 = V diag(phi_hat1, (1 - phi_hat1)/(M-1), ...) V^H.
struct ComparisonInstance {
    std::vector<double> lambda; ///< eigenvalues of Q1 (simplex)
    CVector beta;               ///< U^H mu
    double alpha = 0.0;
    double phi_hat1 = 0.0;

    int antennas() const { return static_cast<int>(lambda.size()); }
    double mean_norm_sq() const { return beta.squaredNorm(); }
};

/// sum_i lambda_i |beta_i|^2 / ||beta||^2, the power on mu / ||mu|| that makes the two
/// k-factors coincide. Throws std::invalid_argument for zero beta or mismatched lengths.
double phi_hat_from_q1(const std::vector<double>& lambda, const CVector& beta);

/// Instance with phi_hat1 chosen by phi_hat_from_q1.
ComparisonInstance make_matched_instance(std::vector<double> lambda, CVector beta, double alpha);

/// Random matched instance: Dirichlet(1) eigenvalues, Haar eigenbasis, random mean and alpha.
ComparisonInstance random_matched_instance(int antennas, Rng& rng);

/// Mixture laws of W_Q1 and of the equal-power W_Q2.
MixtureSpec w_q1_spec(const ComparisonInstance& inst);
MixtureSpec w_q2_spec(const ComparisonInstance& inst);

/// Log-spectrum difference: log prod(1 + lambda_i s) - log[(1 + phi s)(1 + (1-phi)s/(M-1))^(M-1)].
double j_function(const ComparisonInstance& inst, double s);

/// phi ||mu||^2 / (1 + phi s) - sum_i lambda_i |beta_i|^2 / (1 + lambda_i s).
double r_function(const ComparisonInstance& inst, double s);

/// log[M_W2(s) / M_W1(s)] = j(s) - (s / alpha) r(s). Throws std::domain_error for alpha = 0.
double log_mgf_ratio(const ComparisonInstance& inst, double s);

struct LogGrid {
    double lo = 1e-3;
    double hi = 1e3;
    std::size_t points = 200;

    std::vector<double> values() const;
};

struct LtOrderReport {
    std::vector<double> s_grid;
    std::vector<double> log_ratio;
    double max_violation = 0.0; ///< max over the grid of the log ratio (negative when strictly ordered)
    bool ordered = true;
};

/// W_Q1 <=_LT W_Q2 on the grid: ordered iff every log ratio is <= kLtViolationTol.
LtOrderReport lt_order_check(const ComparisonInstance& inst, const LogGrid& grid = {});

/// a majorized by b: descending partial sums of a never exceed those of b.
/// Throws std::invalid_argument on a length mismatch.
bool majorization_check(const std::vector<double>& a, const std::vector<double>& b);

/// (phi, (1-phi)/(M-1), ..., (1-phi)/(M-1)).
std::vector<double> equal_tail_profile(double phi, int antennas);

struct LogExpectationReport {
    double mean1 = 0.0;
    double se1 = 0.0;
    double mean2 = 0.0;
    double se2 = 0.0;
    double combined_se = 0.0;
    std::size_t samples = 0;
    bool holds = true; ///< mean1 <= mean2 + 3 combined_se
};

/// Monte Carlo estimates of E log(1 + d W1) and E log(1 + d W2) with a shared sample count.
LogExpectationReport lemma1_check(const MixtureSpec& spec1, const MixtureSpec& spec2, double d,
                                  std::size_t samples, Rng& rng);

void to_json(nlohmann::json& j, const LtOrderReport& report);
void to_json(nlohmann::json& j, const LogExpectationReport& report);

} // namespace mfrelay
