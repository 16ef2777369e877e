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

#include "mfrelay/stochastic_order.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mfrelay/stats.hpp"

namespace mfrelay {

namespace {

constexpr double kMajorizationTol = 1e-12;

void require_positive_s(double s, const char* who)
{
    if (!(s > 0.0))
        throw std::domain_error(std::string(who) + ": s must be positive");
}

} // namespace

double phi_hat_from_q1(const std::vector<double>& lambda, const CVector& beta)
{
    if (static_cast<Eigen::Index>(lambda.size()) != beta.size())
        throw std::invalid_argument("phi_hat_from_q1: lambda and beta lengths differ");
    const double norm_sq = beta.squaredNorm();
    if (!(norm_sq > 0.0))
        throw std::invalid_argument("phi_hat_from_q1: beta must be nonzero");
    double acc = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i)
        acc += lambda[i] * std::norm(beta[static_cast<Eigen::Index>(i)]);
    return acc / norm_sq;
}

ComparisonInstance make_matched_instance(std::vector<double> lambda, CVector beta, double alpha)
{
    ComparisonInstance inst;
    inst.phi_hat1 = phi_hat_from_q1(lambda, beta);
    inst.lambda = std::move(lambda);
    inst.beta = std::move(beta);
    inst.alpha = alpha;
    return inst;
}

ComparisonInstance random_matched_instance(int antennas, Rng& rng)
{
    std::vector<double> lambda(static_cast<std::size_t>(antennas));
    for (auto& l : lambda)
        l = rng.exponential();
    const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    for (auto& l : lambda)
        l /= total;

    CVector mu(antennas);
    for (int i = 0; i < antennas; ++i)
        mu[i] = rng.complex_normal();
    const double norm = 0.1 + 2.9 * rng.uniform();
    mu *= norm / mu.norm();

    const CMatrix u = haar_unitary(antennas, rng);
    const double alpha = std::exp(std::log(0.05) + (std::log(2.0) - std::log(0.05)) * rng.uniform());
    return make_matched_instance(std::move(lambda), u.adjoint() * mu, alpha);
}

MixtureSpec w_q1_spec(const ComparisonInstance& inst)
{
    MixtureSpec spec;
    spec.weights = inst.lambda;
    spec.noncentralities.resize(inst.lambda.size());
    for (std::size_t i = 0; i < inst.lambda.size(); ++i)
        spec.noncentralities[i] = std::norm(inst.beta[static_cast<Eigen::Index>(i)]) / inst.alpha;
    return spec;
}

MixtureSpec w_q2_spec(const ComparisonInstance& inst)
{
    const int m = inst.antennas();
    MixtureSpec spec;
    spec.weights = equal_tail_profile(inst.phi_hat1, m);
    spec.noncentralities.assign(static_cast<std::size_t>(m), 0.0);
    spec.noncentralities[0] = inst.mean_norm_sq() / inst.alpha;
    return spec;
}

double j_function(const ComparisonInstance& inst, double s)
{
    require_positive_s(s, "j_function");
    const int m = inst.antennas();
    double lhs = 0.0;
    for (double l : inst.lambda)
        lhs += std::log1p(l * s);
    const double tail = (1.0 - inst.phi_hat1) / (m - 1);
    const double rhs = std::log1p(inst.phi_hat1 * s) + (m - 1) * std::log1p(tail * s);
    return lhs - rhs;
}

double r_function(const ComparisonInstance& inst, double s)
{
    require_positive_s(s, "r_function");
    double acc = inst.phi_hat1 * inst.mean_norm_sq() / (1.0 + inst.phi_hat1 * s);
    for (std::size_t i = 0; i < inst.lambda.size(); ++i) {
        const double l = inst.lambda[i];
        acc -= l * std::norm(inst.beta[static_cast<Eigen::Index>(i)]) / (1.0 + l * s);
    }
    return acc;
}

double log_mgf_ratio(const ComparisonInstance& inst, double s)
{
    if (!(inst.alpha > 0.0))
        throw std::domain_error("log_mgf_ratio: alpha = 0 is a deterministic channel, ordering trivial");
    return j_function(inst, s) - (s / inst.alpha) * r_function(inst, s);
}

std::vector<double> LogGrid::values() const
{
    if (!(lo > 0.0) || !(hi > lo) || points < 2)
        throw std::invalid_argument("LogGrid: need 0 < lo < hi and at least two points");
    std::vector<double> out(points);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

LtOrderReport lt_order_check(const ComparisonInstance& inst, const LogGrid& grid)
{
    LtOrderReport report;
    report.s_grid = grid.values();
    report.log_ratio.reserve(report.s_grid.size());
    report.max_violation = -std::numeric_limits<double>::infinity();
    for (double s : report.s_grid) {
        const double v = log_mgf_ratio(inst, s);
        report.log_ratio.push_back(v);
        report.max_violation = std::max(report.max_violation, v);
    }
    report.ordered = report.max_violation <= kLtViolationTol;
    return report;
}

bool majorization_check(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("majorization_check: length mismatch");
    std::vector<double> sa = a;
    std::vector<double> sb = b;
    std::sort(sa.begin(), sa.end(), std::greater<>());
    std::sort(sb.begin(), sb.end(), std::greater<>());
    double pa = 0.0;
    double pb = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        pa += sa[i];
        pb += sb[i];
        if (pa > pb + kMajorizationTol)
            return false;
    }
    return true;
}

std::vector<double> equal_tail_profile(double phi, int antennas)
{
    std::vector<double> out(static_cast<std::size_t>(antennas), (1.0 - phi) / (antennas - 1));
    out[0] = phi;
    return out;
}

LogExpectationReport lemma1_check(const MixtureSpec& spec1, const MixtureSpec& spec2, double d,
                                  std::size_t samples, Rng& rng)
{
    spec1.validate();
    spec2.validate();
    RunningStats s1;
    RunningStats s2;
    for (std::size_t i = 0; i < samples; ++i) {
        s1.add(std::log1p(d * sample_mixture(spec1, rng)));
        s2.add(std::log1p(d * sample_mixture(spec2, rng)));
    }
    LogExpectationReport report;
    report.mean1 = s1.mean();
    report.se1 = s1.std_error();
    report.mean2 = s2.mean();
    report.se2 = s2.std_error();
    report.combined_se = pooled_se(report.se1, report.se2);
    report.samples = samples;
    report.holds = report.mean1 <= report.mean2 + 3.0 * report.combined_se;
    return report;
}

void to_json(nlohmann::json& j, const LtOrderReport& report)
{
    j = nlohmann::json{{"s_grid", report.s_grid},
                       {"log_ratio", report.log_ratio},
                       {"max_violation", report.max_violation},
                       {"verdict", report.ordered ? "ordered" : "violated"}};
}

void to_json(nlohmann::json& j, const LogExpectationReport& report)
{
    j = nlohmann::json{{"mean1", report.mean1},         {"se1", report.se1},
                       {"mean2", report.mean2},         {"se2", report.se2},
                       {"combined_se", report.combined_se}, {"samples", report.samples},
                       {"holds", report.holds}};
}

} // namespace mfrelay
