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

#include "mfrelay/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mfrelay/stats.hpp"
#include "mfrelay/stochastic_order.hpp"

namespace mfrelay {

namespace {

constexpr double kAlignmentTol = 1e-8;
constexpr int kMaxAscentIterations = 500;

CapacityEstimate summarize(const RunningStats& stats, const SamplingOptions& opts)
{
    return {stats.mean(), stats.std_error(), stats.count(), opts.seed, opts.workers == 0 ? 1u : opts.workers};
}

// Draws are taken sequentially per worker stream so the sample set matches run_streams' split.
template <typename PerSample>
void draw_streams(const SamplingOptions& opts, PerSample per_sample)
{
    const unsigned workers = opts.workers == 0 ? 1 : opts.workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t count = opts.samples / workers + (w < opts.samples % workers ? 1 : 0);
        Rng rng(opts.seed, w);
        for (std::size_t i = 0; i < count; ++i)
            per_sample(rng);
    }
}

} // namespace

void SearchConfig::validate() const
{
    if (!(tolerance > 0.0))
        throw std::invalid_argument("SearchConfig: tolerance must be positive");
    if (!(lo >= 0.0) || !(hi <= 1.0) || !(lo < hi))
        throw std::invalid_argument("SearchConfig: bracket must satisfy 0 <= lo < hi <= 1");
    if (sampling.samples < 2)
        throw std::invalid_argument("SearchConfig: need at least two samples per evaluation");
}

SourceCovariance OptimalStructure::covariance() const
{
    const int m = static_cast<int>(basis.rows());
    const auto profile = equal_tail_profile(phi, m);
    return SourceCovariance(basis, Eigen::Map<const RVector>(profile.data(), m));
}

ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                      double tolerance)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    ScalarOptimum out;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    out.evaluations = 2;
    while (b - a > tolerance) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++out.evaluations;
    }
    out.x = 0.5 * (a + b);
    out.value = f(out.x);
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    out.evaluations += 3;
    if (f_lo > out.value) {
        out.x = lo;
        out.value = f_lo;
    }
    if (f_hi >= out.value) {
        out.x = hi;
        out.value = f_hi;
    }
    return out;
}

SourceCovariance build_q_opt(const ChannelMeanModel& model, double phi)
{
    if (!(phi >= 0.0 && phi <= 1.0))
        throw std::invalid_argument("build_q_opt: phi must lie in [0, 1]");
    if (!(model.mean_norm() > 0.0))
        throw std::invalid_argument("build_q_opt: zero mean vector, use the isotropic covariance I/M");
    const int m = model.antennas();
    const auto profile = equal_tail_profile(phi, m);
    return SourceCovariance(complete_orthonormal_basis(model.mu()), Eigen::Map<const RVector>(profile.data(), m));
}

PhiObjective::PhiObjective(const ChannelMeanModel& model, const LinkParams& params,
                           const FadingDistribution& fading, const SamplingOptions& opts)
    : mean_norm_sq_(model.mean_norm_sq()), alpha_(model.alpha()), gamma_(params.gamma()),
      antennas_(model.antennas()), opts_(opts)
{
    lead_.reserve(opts.samples);
    tail_.reserve(opts.samples);
    forward_.reserve(opts.samples);
    const double root_alpha = std::sqrt(alpha_);
    const double mean_norm = model.mean_norm();
    const double g = params.g_relay();
    const bool deterministic_backward = alpha_ == 0.0;
    draw_streams(opts, [&](Rng& rng) {
        if (deterministic_backward) {
            lead_.push_back(mean_norm_sq_);
            tail_.push_back(0.0);
        } else {
            const cplx h1 = rng.complex_normal();
            double tail = 0.0;
            for (int i = 1; i < antennas_; ++i)
                tail += std::norm(rng.complex_normal());
            lead_.push_back(std::norm(root_alpha * h1 + mean_norm));
            tail_.push_back(alpha_ * tail);
        }
        forward_.push_back(g * std::norm(fading.sample(rng)));
    });
}

CapacityEstimate PhiObjective::operator()(double phi) const
{
    if (!(phi >= 0.0 && phi <= 1.0))
        throw std::invalid_argument("phi_objective: phi must lie in [0, 1]");
    const double tail_weight = (1.0 - phi) / (antennas_ - 1);
    const double mean_power = phi * mean_norm_sq_ + alpha_;
    RunningStats stats;
    for (std::size_t i = 0; i < forward_.size(); ++i) {
        const double t = forward_[i];
        const double numerator = phi * lead_[i] + tail_weight * tail_[i];
        stats.add(0.5 * std::log1p(t * numerator / (mean_power + (1.0 + t) / gamma_)));
    }
    return summarize(stats, opts_);
}

CapacityEstimate phi_objective(double phi, const ChannelMeanModel& model, const LinkParams& params,
                               const FadingDistribution& fading, const SamplingOptions& opts)
{
    return PhiObjective(model, params, fading, opts)(phi);
}

OptimalStructure optimize_phi(const ChannelMeanModel& model, const LinkParams& params,
                              const FadingDistribution& fading, const SearchConfig& cfg)
{
    cfg.validate();
    const PhiObjective objective(model, params, fading, cfg.sampling);
    OptimalStructure out;
    const int m = model.antennas();
    if (!(model.mean_norm() > 0.0)) {
        out.basis = CMatrix::Identity(m, m);
        out.phi = 1.0 / m;
        out.direction_indifferent = true;
        out.capacity = objective(out.phi);
        out.evaluations = 1;
        return out;
    }
    const auto best = golden_section_maximize([&](double phi) { return objective(phi).mean; }, cfg.lo,
                                              cfg.hi, cfg.tolerance);
    out.basis = complete_orthonormal_basis(model.mu());
    out.phi = best.x;
    out.capacity = objective(best.x);
    out.evaluations = best.evaluations;
    return out;
}

FixedBasisObjective::FixedBasisObjective(const CMatrix& basis, const ChannelMeanModel& model,
                                         const LinkParams& params, const FadingDistribution& fading,
                                         const SamplingOptions& opts)
    : alpha_(model.alpha()), gamma_(params.gamma()), antennas_(model.antennas()), opts_(opts)
{
    if (basis.rows() != antennas_ || basis.cols() != antennas_)
        throw std::invalid_argument("FixedBasisObjective: basis dimension does not match the model");
    const CMatrix basis_h = basis.adjoint();
    const CVector mean_coords = basis_h * model.mu();
    mean_projections_.resize(static_cast<std::size_t>(antennas_));
    for (int i = 0; i < antennas_; ++i)
        mean_projections_[static_cast<std::size_t>(i)] = std::norm(mean_coords[i]);

    projections_.reserve(opts.samples * static_cast<std::size_t>(antennas_));
    forward_.reserve(opts.samples);
    const double g = params.g_relay();
    draw_streams(opts, [&](Rng& rng) {
        const CVector coords = basis_h * sample_backward_channel(model, rng);
        for (int i = 0; i < antennas_; ++i)
            projections_.push_back(std::norm(coords[i]));
        forward_.push_back(g * std::norm(fading.sample(rng)));
    });
}

CapacityEstimate FixedBasisObjective::operator()(const std::vector<double>& weights) const
{
    RunningStats stats;
    double mean_power = alpha_;
    for (int i = 0; i < antennas_; ++i)
        mean_power += weights[static_cast<std::size_t>(i)] * mean_projections_[static_cast<std::size_t>(i)];
    for (std::size_t n = 0; n < forward_.size(); ++n) {
        const double* a = &projections_[n * static_cast<std::size_t>(antennas_)];
        double received = 0.0;
        for (int i = 0; i < antennas_; ++i)
            received += weights[static_cast<std::size_t>(i)] * a[i];
        const double t = forward_[n];
        stats.add(0.5 * std::log1p(t * received / (mean_power + (1.0 + t) / gamma_)));
    }
    return summarize(stats, opts_);
}

double FixedBasisObjective::value_and_gradient(const std::vector<double>& weights,
                                               std::vector<double>& gradient) const
{
    const auto m = static_cast<std::size_t>(antennas_);
    gradient.assign(m, 0.0);
    double mean_power = alpha_;
    for (std::size_t i = 0; i < m; ++i)
        mean_power += weights[i] * mean_projections_[i];
    double sum = 0.0;
    for (std::size_t n = 0; n < forward_.size(); ++n) {
        const double* a = &projections_[n * m];
        double received = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            received += weights[i] * a[i];
        const double t = forward_[n];
        const double denom = mean_power + (1.0 + t) / gamma_;
        sum += 0.5 * std::log1p(t * received / denom);
        // d/dw_i of (1/2) log(1 + t N / D) = t (a_i D - N b_i) / (2 D (D + t N))
        const double scale = 0.5 * t / (denom * (denom + t * received));
        for (std::size_t i = 0; i < m; ++i)
            gradient[i] += scale * (a[i] * denom - received * mean_projections_[i]);
    }
    const double inv_n = 1.0 / static_cast<double>(forward_.size());
    for (auto& gi : gradient)
        gi *= inv_n;
    return sum * inv_n;
}

std::vector<double> project_to_simplex(const std::vector<double>& v)
{
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - candidate > 0.0)
            theta = candidate;
    }
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = std::max(0.0, v[i] - theta);
    return out;
}

SuboptimalResult optimize_suboptimal(const CMatrix& basis, const ChannelMeanModel& model,
                                     const LinkParams& params, const FadingDistribution& fading,
                                     const SearchConfig& cfg)
{
    cfg.validate();
    const int m = model.antennas();
    const double mean_norm = model.mean_norm();
    if (mean_norm > 0.0) {
        for (int i = 0; i < m; ++i) {
            const double cosine = std::abs(basis.col(i).dot(model.mu())) / (basis.col(i).norm() * mean_norm);
            if (cosine >= 1.0 - kAlignmentTol)
                throw std::invalid_argument("instance belongs to the optimal family");
        }
    }
    const FixedBasisObjective objective(basis, model, params, fading, cfg.sampling);
    SuboptimalResult out;

    if (m == 2) {
        const auto best = golden_section_maximize(
            [&](double l1) { return objective({l1, 1.0 - l1}).mean; }, 0.0, 1.0, cfg.tolerance);
        out.weights = {best.x, 1.0 - best.x};
        out.evaluations = best.evaluations;
    } else {
        std::vector<double> weights(static_cast<std::size_t>(m), 1.0 / m);
        std::vector<double> grad;
        double value = objective.value_and_gradient(weights, grad);
        double step = 1.0;
        int evaluations = 1;
        for (int it = 0; it < kMaxAscentIterations; ++it) {
            std::vector<double> trial(weights.size());
            for (std::size_t i = 0; i < weights.size(); ++i)
                trial[i] = weights[i] + step * grad[i];
            trial = project_to_simplex(trial);
            double move = 0.0;
            for (std::size_t i = 0; i < weights.size(); ++i)
                move = std::max(move, std::abs(trial[i] - weights[i]));
            if (move < cfg.tolerance)
                break;
            std::vector<double> trial_grad;
            const double trial_value = objective.value_and_gradient(trial, trial_grad);
            ++evaluations;
            if (trial_value >= value) {
                weights = std::move(trial);
                grad = std::move(trial_grad);
                value = trial_value;
                step *= 1.5;
            } else {
                step *= 0.5;
            }
        }
        out.weights = std::move(weights);
        out.evaluations = evaluations;
    }
    out.capacity = objective(out.weights);
    return out;
}

CMatrix rotated_basis(const CVector& mu, double angle_rad)
{
    const CMatrix v = complete_orthonormal_basis(mu);
    CMatrix rotation = CMatrix::Identity(v.rows(), v.cols());
    rotation(0, 0) = std::cos(angle_rad);
    rotation(1, 0) = std::sin(angle_rad);
    rotation(0, 1) = -std::sin(angle_rad);
    rotation(1, 1) = std::cos(angle_rad);
    return v * rotation;
}

namespace {

nlohmann::json matrix_json(const CMatrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

void to_json(nlohmann::json& j, const OptimalStructure& result)
{
    j = nlohmann::json{{"basis", matrix_json(result.basis)},
                       {"phi", result.phi},
                       {"capacity", result.capacity},
                       {"direction_indifferent", result.direction_indifferent},
                       {"evaluations", result.evaluations}};
}

void to_json(nlohmann::json& j, const SuboptimalResult& result)
{
    j = nlohmann::json{{"weights", result.weights},
                       {"capacity", result.capacity},
                       {"evaluations", result.evaluations}};
}

} // namespace mfrelay
