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

#include <functional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mfrelay/capacity.hpp"
#include "mfrelay/channel.hpp"

namespace mfrelay {

struct SearchConfig {
    double tolerance = 1e-4; ///< final bracket width on phi
    SamplingOptions sampling{};
    double lo = 0.0;
    double hi = 1.0;

    /// Throws std::invalid_argument unless tolerance > 0 and 0 <= lo < hi <= 1.
    void validate() const;
};

/// Optimal covariance V diag(phi, (1-phi)/(M-1), ...) V^H with V's first column along mu.
struct OptimalStructure {
    CMatrix basis;
    double phi = 1.0;
    CapacityEstimate capacity;
    bool direction_indifferent = false; ///< mu = 0: every basis is optimal, phi = 1/M
    int evaluations = 0;

    SourceCovariance covariance() const;
};

struct SuboptimalResult {
    std::vector<double> weights;
    CapacityEstimate capacity;
    int evaluations = 0;
};

struct ScalarOptimum {
    double x = 0.0;
    double value = 0.0;
    int evaluations = 0;
};

/// Golden-section maximization of a unimodal f on [lo, hi]; the endpoints are compared against
/// the interior optimum so boundary maxima are returned exactly.
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                      double tolerance);

/// V diag(phi, (1-phi)/(M-1), ...) V^H with V from complete_orthonormal_basis(mu).
/// Throws std::invalid_argument for mu = 0 (use SourceCovariance::isotropic) or phi outside [0, 1].
SourceCovariance build_q_opt(const ChannelMeanModel& model, double phi);

/// Capacity of the optimal family as a function of phi, written in the mean-aligned coordinates
/// h_hat = V^H h_w:
///   (1/2) E log[1 + t (phi |sqrt(alpha) h1 + ||mu|||^2 + (1-phi)/(M-1) alpha sum_{i>=2} |h_i|^2)
///                   / (phi ||mu||^2 + alpha + (1 + t)/gamma)],  t = G |h_F|^2.
/// The draws are taken once at construction, so repeated evaluations share common random numbers
/// and the objective is a deterministic function of phi.
class PhiObjective {
public:
    PhiObjective(const ChannelMeanModel& model, const LinkParams& params, const FadingDistribution& fading,
                 const SamplingOptions& opts);

    CapacityEstimate operator()(double phi) const;

private:
    std::vector<double> lead_;
    std::vector<double> tail_;
    std::vector<double> forward_;
    double mean_norm_sq_;
    double alpha_;
    double gamma_;
    int antennas_;
    SamplingOptions opts_;
};

CapacityEstimate phi_objective(double phi, const ChannelMeanModel& model, const LinkParams& params,
                               const FadingDistribution& fading, const SamplingOptions& opts);

OptimalStructure optimize_phi(const ChannelMeanModel& model, const LinkParams& params,
                              const FadingDistribution& fading, const SearchConfig& cfg);

/// Capacity of U diag(lambda) U^H for a fixed basis U, pre-drawn like PhiObjective.
class FixedBasisObjective {
public:
    FixedBasisObjective(const CMatrix& basis, const ChannelMeanModel& model, const LinkParams& params,
                        const FadingDistribution& fading, const SamplingOptions& opts);

    CapacityEstimate operator()(const std::vector<double>& weights) const;
    /// Mean and its gradient with respect to the weights.
    double value_and_gradient(const std::vector<double>& weights, std::vector<double>& gradient) const;
    int antennas() const { return antennas_; }

private:
    std::vector<double> projections_; ///< |u_i^H h_B|^2, row-major by sample
    std::vector<double> forward_;
    std::vector<double> mean_projections_; ///< |u_i^H mu|^2
    double alpha_;
    double gamma_;
    int antennas_;
    SamplingOptions opts_;
};

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(const std::vector<double>& v);

/// Best power allocation for a fixed eigenbasis (golden section for M = 2, projected-gradient
/// ascent otherwise). Throws std::invalid_argument("instance belongs to the optimal family") if a
/// column of U is aligned with mu.
SuboptimalResult optimize_suboptimal(const CMatrix& basis, const ChannelMeanModel& model,
                                     const LinkParams& params, const FadingDistribution& fading,
                                     const SearchConfig& cfg);

/// Unitary whose first column sits at the given angle from mu / ||mu|| (M = 2 rotation embedded
/// in the mean-aligned basis).
CMatrix rotated_basis(const CVector& mu, double angle_rad);

void to_json(nlohmann::json& j, const OptimalStructure& result);
void to_json(nlohmann::json& j, const SuboptimalResult& result);

} // namespace mfrelay
