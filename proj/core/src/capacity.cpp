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

#include "mfrelay/capacity.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mfrelay/stats.hpp"
#include "parallel.hpp"

namespace mfrelay {

namespace {

constexpr double kKMatchTol = 1e-12;

void require_unit_trace(const SourceCovariance& q, const char* who)
{
    if (std::abs(q.trace() - 1.0) > kTraceTol)
        throw std::invalid_argument(std::string(who) + ": covariance must have unit trace");
}

void require_valid(const SourceCovariance& q, const ChannelMeanModel& model, const char* who)
{
    if (q.dimension() != model.antennas())
        throw std::invalid_argument(std::string(who) + ": covariance dimension does not match the model");
    const auto report = validate_covariance(q);
    if (!report.ok())
        throw std::invalid_argument(std::string(who) + ": invalid Q (" + report.describe() + ")");
}

CapacityEstimate to_estimate(const RunningStats& stats, const SamplingOptions& opts)
{
    return {stats.mean(), stats.std_error(), stats.count(), opts.seed, opts.workers == 0 ? 1u : opts.workers};
}

// Instantaneous rate given the forward gain t = G|h_F|^2, the received power q = h_B^H Q h_B and
// the mean power mu^H Q mu.
inline double mean_feedback_rate(double t, double q, double mean_power, double alpha, double gamma)
{
    return std::log1p(t * q / (mean_power + alpha + (t + 1.0) / gamma));
}

} // namespace

double amplifier_gain(const SourceCovariance& q, const ChannelMeanModel& model, const LinkParams& params)
{
    const double mean_power = quadratic_form(model.mu(), q);
    return std::sqrt(params.g_relay() /
                     (1.0 + params.gamma() * (mean_power + model.alpha() * q.trace())));
}

double integrand_raw(const CVector& h_b, cplx h_f, const SourceCovariance& q,
                     const ChannelMeanModel& model, const LinkParams& params)
{
    const double eta = amplifier_gain(q, model, params);
    const double eta_sq = eta * eta;
    const double fwd = std::norm(h_f);
    const double received = quadratic_form(h_b, q);
    return std::log1p(eta_sq * params.gamma() * fwd * received / (eta_sq * fwd + 1.0));
}

double integrand_meanfeedback(const CVector& h_b, cplx h_f, const SourceCovariance& q,
                              const ChannelMeanModel& model, const LinkParams& params)
{
    require_unit_trace(q, "integrand_meanfeedback");
    const double t = params.g_relay() * std::norm(h_f);
    return mean_feedback_rate(t, quadratic_form(h_b, q), quadratic_form(model.mu(), q), model.alpha(),
                              params.gamma());
}

CapacityEstimate estimate_capacity(const SourceCovariance& q, const ChannelMeanModel& model,
                                   const LinkParams& params, const FadingDistribution& fading,
                                   const SamplingOptions& opts)
{
    require_valid(q, model, "estimate_capacity");
    const CMatrix& qm = q.matrix();
    const double mean_power = quadratic_form(model.mu(), qm);
    const double alpha = model.alpha();
    const double gamma = params.gamma();
    const double g = params.g_relay();
    const bool deterministic_backward = alpha == 0.0;

    auto body = [&](Rng& rng, std::size_t count, RunningStats& out) {
        const double fixed_q = mean_power;
        for (std::size_t i = 0; i < count; ++i) {
            const double received =
                deterministic_backward ? fixed_q : quadratic_form(sample_backward_channel(model, rng), qm);
            const double t = g * std::norm(fading.sample(rng));
            out.add(0.5 * mean_feedback_rate(t, received, mean_power, alpha, gamma));
        }
    };
    return to_estimate(detail::run_streams(opts.samples, opts.seed, opts.workers, body), opts);
}

CapacityEstimate estimate_miso_capacity(const SourceCovariance& q, const ChannelMeanModel& model,
                                        double gamma, const SamplingOptions& opts)
{
    require_valid(q, model, "estimate_miso_capacity");
    const CMatrix& qm = q.matrix();
    auto body = [&](Rng& rng, std::size_t count, RunningStats& out) {
        for (std::size_t i = 0; i < count; ++i)
            out.add(0.5 * std::log1p(gamma * quadratic_form(sample_backward_channel(model, rng), qm)));
    };
    return to_estimate(detail::run_streams(opts.samples, opts.seed, opts.workers, body), opts);
}

double k_factor_q1(const ComparisonInstance& inst, const LinkParams& params, cplx h_f)
{
    const double t = params.g_relay() * std::norm(h_f);
    double mean_power = 0.0;
    for (std::size_t i = 0; i < inst.lambda.size(); ++i)
        mean_power += inst.lambda[i] * std::norm(inst.beta[static_cast<Eigen::Index>(i)]);
    return t * inst.alpha / (mean_power + inst.alpha + (1.0 + t) / params.gamma());
}

double k_factor_q2(const ComparisonInstance& inst, const LinkParams& params, cplx h_f)
{
    const double t = params.g_relay() * std::norm(h_f);
    return t * inst.alpha /
           (inst.phi_hat1 * inst.mean_norm_sq() + inst.alpha + (1.0 + t) / params.gamma());
}

double ConditionalPair::pooled_se() const { return mfrelay::pooled_se(se1, se2); }

ConditionalPair conditional_capacity_pair(const ComparisonInstance& inst, const LinkParams& params,
                                          cplx h_f, std::size_t samples, Rng& rng)
{
    if (!(inst.alpha > 0.0))
        throw std::invalid_argument("conditional_capacity_pair: alpha must be positive");
    ConditionalPair pair;
    pair.k1 = k_factor_q1(inst, params, h_f);
    pair.k2 = k_factor_q2(inst, params, h_f);
    if (std::abs(pair.k1 - pair.k2) > kKMatchTol * std::max(1.0, std::abs(pair.k1)))
        throw std::invalid_argument("comparison requires phi_hat1 matched to Q1 (k1 == k2)");
    const double k = pair.k1;

    const int m = inst.antennas();
    const double inv_root_alpha = 1.0 / std::sqrt(inst.alpha);
    const double lead_mean = std::sqrt(inst.mean_norm_sq()) * inv_root_alpha;
    const double tail_weight = (1.0 - inst.phi_hat1) / (m - 1);
    CVector shifted(m);
    for (int i = 0; i < m; ++i)
        shifted[i] = inst.beta[i] * inv_root_alpha;

    RunningStats s1;
    RunningStats s2;
    std::vector<cplx> g(static_cast<std::size_t>(m));
    for (std::size_t n = 0; n < samples; ++n) {
        for (auto& x : g)
            x = rng.complex_normal();
        double w1 = 0.0;
        for (int i = 0; i < m; ++i)
            w1 += inst.lambda[static_cast<std::size_t>(i)] * std::norm(g[static_cast<std::size_t>(i)] + shifted[i]);
        double tail = 0.0;
        for (int i = 1; i < m; ++i)
            tail += std::norm(g[static_cast<std::size_t>(i)]);
        const double w2 = inst.phi_hat1 * std::norm(g[0] + lead_mean) + tail_weight * tail;
        s1.add(std::log1p(k * w1));
        s2.add(std::log1p(k * w2));
    }
    pair.mean1 = s1.mean();
    pair.se1 = s1.std_error();
    pair.mean2 = s2.mean();
    pair.se2 = s2.std_error();
    pair.samples = samples;
    return pair;
}

void to_json(nlohmann::json& j, const CapacityEstimate& estimate)
{
    j = nlohmann::json{{"mean_nats", estimate.mean},
                       {"std_error", estimate.std_error},
                       {"n_samples", estimate.n_samples},
                       {"seed", estimate.seed},
                       {"workers", estimate.workers}};
}

void to_json(nlohmann::json& j, const ConditionalPair& pair)
{
    j = nlohmann::json{{"mean1", pair.mean1}, {"se1", pair.se1}, {"mean2", pair.mean2},
                       {"se2", pair.se2},     {"k1", pair.k1},   {"k2", pair.k2},
                       {"samples", pair.samples}};
}

nlohmann::json provenance_json(const ChannelMeanModel& model, const LinkParams& params)
{
    nlohmann::json mu = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.mu().size(); ++i)
        mu.push_back({model.mu()[i].real(), model.mu()[i].imag()});
    return nlohmann::json{{"antennas", model.antennas()},
                          {"mu", mu},
                          {"alpha", model.alpha()},
                          {"gamma", params.gamma()},
                          {"g_relay", params.g_relay()}};
}

} // namespace mfrelay
