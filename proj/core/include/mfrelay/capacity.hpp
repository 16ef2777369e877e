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
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "mfrelay/channel.hpp"
#include "mfrelay/stochastic_order.hpp"

namespace mfrelay {

/// Monte Carlo controls shared by every estimator. Results are a deterministic function of
/// (seed, workers).
struct SamplingOptions {
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

/// Ergodic capacity estimate in nats per channel use, half-duplex factor 1/2 applied.
struct CapacityEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

/// Relay amplification eta = sqrt(G / (1 + gamma [mu^H Q mu + alpha tr Q])).
double amplifier_gain(const SourceCovariance& q, const ChannelMeanModel& model, const LinkParams& params);

/// log[1 + eta^2 gamma |h_F|^2 h_B^H Q h_B / (eta^2 |h_F|^2 + 1)].
double integrand_raw(const CVector& h_b, cplx h_f, const SourceCovariance& q,
                     const ChannelMeanModel& model, const LinkParams& params);

/// log[1 + G |h_F|^2 h_B^H Q h_B / (mu^H Q mu + alpha + (G |h_F|^2 + 1) / gamma)].
/// Requires tr Q = 1 (std::invalid_argument otherwise).
double integrand_meanfeedback(const CVector& h_b, cplx h_f, const SourceCovariance& q,
                              const ChannelMeanModel& model, const LinkParams& params);

/// (1/2) E log(...) over h_B and h_F. Throws std::invalid_argument if Q fails validation.
CapacityEstimate estimate_capacity(const SourceCovariance& q, const ChannelMeanModel& model,
                                   const LinkParams& params, const FadingDistribution& fading,
                                   const SamplingOptions& opts);

/// Conventional MISO link without the relay: (1/2) E log(1 + gamma h_B^H Q h_B).
CapacityEstimate estimate_miso_capacity(const SourceCovariance& q, const ChannelMeanModel& model,
                                        double gamma, const SamplingOptions& opts);

/// k1 = G|h_F|^2 alpha / (sum lambda_i |beta_i|^2 + alpha + (1 + G|h_F|^2)/gamma).
double k_factor_q1(const ComparisonInstance& inst, const LinkParams& params, cplx h_f);
/// k2 = G|h_F|^2 alpha / (phi_hat1 ||mu||^2 + alpha + (1 + G|h_F|^2)/gamma).
double k_factor_q2(const ComparisonInstance& inst, const LinkParams& params, cplx h_f);

struct ConditionalPair {
    double mean1 = 0.0; ///< E log(1 + k W_Q1)
    double se1 = 0.0;
    double mean2 = 0.0; ///< E log(1 + k W_Q2), equal-power tail
    double se2 = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    std::size_t samples = 0;

    double pooled_se() const;
};

/// Both W variables are driven by one shared CN(0, I_M) draw expressed in their own eigenbases.
/// Throws std::invalid_argument if phi_hat1 is not matched (k1 != k2).
ConditionalPair conditional_capacity_pair(const ComparisonInstance& inst, const LinkParams& params,
                                          cplx h_f, std::size_t samples, Rng& rng);

void to_json(nlohmann::json& j, const CapacityEstimate& estimate);
void to_json(nlohmann::json& j, const ConditionalPair& pair);
nlohmann::json provenance_json(const ChannelMeanModel& model, const LinkParams& params);

} // namespace mfrelay
