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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mfrelay/beamforming.hpp"
#include "mfrelay/optimizer.hpp"
#include "mfrelay/stats.hpp"
#include "test_support.hpp"

using namespace mfrelay;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SearchConfig search(std::size_t samples, std::uint64_t seed)
{
    SearchConfig cfg;
    cfg.sampling = {samples, seed, 1};
    return cfg;
}

std::vector<double> sorted_desc(const RVector& v)
{
    std::vector<double> out(v.data(), v.data() + v.size());
    std::sort(out.rbegin(), out.rend());
    return out;
}

} // namespace

TEST_CASE("golden-section search", "[optimizer]")
{
    SECTION("interior maximum")
    {
        const auto r = golden_section_maximize([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-8);
        CHECK_THAT(r.x, WithinAbs(0.3, 1e-7));
        CHECK(r.evaluations > 10);
    }
    SECTION("boundary maxima are returned exactly")
    {
        CHECK(golden_section_maximize([](double x) { return x; }, 0.0, 1.0, 1e-4).x == 1.0);
        CHECK(golden_section_maximize([](double x) { return -x; }, 0.0, 1.0, 1e-4).x == 0.0);
    }
    SECTION("search configuration is validated")
    {
        SearchConfig cfg;
        CHECK_NOTHROW(cfg.validate());
        cfg.tolerance = 0.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = SearchConfig{};
        cfg.lo = 0.8;
        cfg.hi = 0.2;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
}

TEST_CASE("optimal covariance structure", "[optimizer]")
{
    SECTION("phi = 1 is beamforming along mu")
    {
        const ChannelMeanModel model(test::fig1_mean(), 0.1);
        const CVector u = model.mu() / model.mu().norm();
        const CMatrix expected = u * u.adjoint();
        CHECK((build_q_opt(model, 1.0).matrix() - expected).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SECTION("phi = 1/M is isotropic for any mean")
    {
        Rng rng(97);
        for (int m = 2; m <= 6; ++m) {
            const ChannelMeanModel model(test::random_vector(m, rng), 0.2);
            const CMatrix q = build_q_opt(model, 1.0 / m).matrix();
            CHECK((q - CMatrix::Identity(m, m) / m).cwiseAbs().maxCoeff() <= 1e-14);
        }
    }
    SECTION("axis-aligned mean gives a diagonal covariance")
    {
        CVector mu = CVector::Zero(2);
        mu[0] = 1.0;
        const CMatrix q = build_q_opt(ChannelMeanModel(mu, 0.5), 0.7).matrix();
        CHECK_THAT(q(0, 0).real(), WithinAbs(0.7, 1e-15));
        CHECK_THAT(q(1, 1).real(), WithinAbs(0.3, 1e-15));
        CHECK(std::abs(q(0, 1)) <= 1e-15);
    }
    SECTION("always a valid covariance with the prescribed spectrum")
    {
        Rng rng(101);
        for (int trial = 0; trial < 200; ++trial) {
            const int m = 2 + trial % 6;
            const double phi = rng.uniform();
            const auto q = build_q_opt(ChannelMeanModel(test::random_vector(m, rng), 0.3), phi);
            CHECK(validate_covariance(q).ok());
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(q.matrix());
            const auto spectrum = sorted_desc(eig.eigenvalues());
            std::vector<double> expected(static_cast<std::size_t>(m), (1.0 - phi) / (m - 1));
            expected[0] = phi;
            std::sort(expected.rbegin(), expected.rend());
            for (int i = 0; i < m; ++i)
                CHECK_THAT(spectrum[static_cast<std::size_t>(i)],
                           WithinAbs(expected[static_cast<std::size_t>(i)], 1e-12));
        }
    }
    SECTION("invalid requests")
    {
        CHECK_THROWS_WITH(build_q_opt(ChannelMeanModel(CVector::Zero(2), 0.1), 0.5),
                          Catch::Matchers::ContainsSubstring("isotropic"));
        CHECK_THROWS_AS(build_q_opt(ChannelMeanModel(test::fig1_mean(), 0.1), 1.2), std::invalid_argument);
    }
}

TEST_CASE("phi objective", "[optimizer]")
{
    const ChannelMeanModel fig1(test::fig1_mean(), 0.1);
    const auto rayleigh = FadingDistribution::rayleigh();
    SECTION("agrees with the capacity estimator on the built covariance")
    {
        Rng rng(103);
        for (int trial = 0; trial < 6; ++trial) {
            const double phi = rng.uniform();
            const auto params = LinkParams::from_db(-5.0 + 35.0 * rng.uniform(), 15.0);
            const auto a = phi_objective(phi, fig1, params, rayleigh, {300000, 107, 1});
            const auto b = estimate_capacity(build_q_opt(fig1, phi), fig1, params, rayleigh, {300000, 109, 1});
            CHECK(std::abs(a.mean - b.mean) <= 3.0 * pooled_se(a.std_error, b.std_error));
        }
    }
    SECTION("also for more antennas")
    {
        Rng rng(113);
        const ChannelMeanModel model(test::random_vector(4, rng), 0.4);
        const auto params = LinkParams::from_db(12.0, 10.0);
        const auto a = phi_objective(0.55, model, params, rayleigh, {300000, 1, 1});
        const auto b = estimate_capacity(build_q_opt(model, 0.55), model, params, rayleigh, {300000, 2, 1});
        CHECK(std::abs(a.mean - b.mean) <= 3.0 * pooled_se(a.std_error, b.std_error));
    }
    SECTION("dead forward link gives zero")
    {
        const auto e = phi_objective(0.4, fig1, LinkParams(10.0, 10.0), FadingDistribution::constant(0.0),
                                     {1000, 1, 1});
        CHECK(e.mean == 0.0);
    }
    SECTION("pre-drawn objective is a deterministic function of phi")
    {
        const PhiObjective objective(fig1, LinkParams::from_db(20.0, 15.0), rayleigh, {20000, 3, 1});
        CHECK(objective(0.37).mean == objective(0.37).mean);
        CHECK_THROWS_AS(objective(-0.1), std::invalid_argument);
    }
}

TEST_CASE("phi search", "[optimizer]")
{
    const auto rayleigh = FadingDistribution::rayleigh();
    const ChannelMeanModel fig3(test::fig3_mean(), 0.5);
    const double g_fig3 = db_to_linear(10.0);

    SECTION("beamforming regime at small gamma")
    {
        const auto r = optimize_phi(fig3, LinkParams(0.1, g_fig3), rayleigh, search(200000, 5));
        CHECK(r.phi == 1.0);
        CHECK(f_gamma(0.1, fig3, g_fig3) <= 0.0);
        CHECK_FALSE(r.direction_indifferent);
        CHECK((r.basis.col(0) - fig3.mu() / fig3.mu().norm()).norm() <= 1e-12);
        CHECK(validate_covariance(r.covariance()).ok());
    }
    SECTION("full-rank regime at large gamma")
    {
        const auto r = optimize_phi(fig3, LinkParams::from_db(30.0, 10.0), rayleigh, search(200000, 5));
        CHECK(r.phi < 1.0 - 1e-3);
        CHECK(f_gamma(db_to_linear(30.0), fig3, g_fig3) > 0.0);
    }
    SECTION("re-running is bit-deterministic")
    {
        const auto params = LinkParams::from_db(20.0, 10.0);
        const auto a = optimize_phi(fig3, params, rayleigh, search(50000, 9));
        const auto b = optimize_phi(fig3, params, rayleigh, search(50000, 9));
        CHECK(a.phi == b.phi);
        CHECK(a.capacity.mean == b.capacity.mean);
        CHECK(a.phi >= 0.0);
        CHECK(a.phi <= 1.0);
    }
    SECTION("the searched phi beats every point of a coarse grid")
    {
        const auto params = LinkParams::from_db(25.0, 10.0);
        const SamplingOptions opts{100000, 11, 1};
        const auto r = optimize_phi(fig3, params, rayleigh, search(opts.samples, opts.seed));
        const PhiObjective objective(fig3, params, rayleigh, opts);
        for (double phi = 0.0; phi <= 1.0; phi += 0.05)
            CHECK(r.capacity.mean >= objective(phi).mean - 1e-12);
    }
    SECTION("zero mean: isotropic, flagged, and maximal over phi")
    {
        const ChannelMeanModel zero(CVector::Zero(3), 0.5);
        const auto params = LinkParams::from_db(10.0, 10.0);
        const SamplingOptions opts{200000, 13, 1};
        const auto r = optimize_phi(zero, params, rayleigh, search(opts.samples, opts.seed));
        CHECK(r.direction_indifferent);
        CHECK_THAT(r.phi, WithinRel(1.0 / 3.0, 1e-15));
        CHECK((r.covariance().matrix() - CMatrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() <= 1e-15);
        const PhiObjective objective(zero, params, rayleigh, opts);
        for (double phi = 0.0; phi <= 1.0; phi += 0.1) {
            const auto e = objective(phi);
            CHECK(r.capacity.mean >= e.mean - 3.0 * pooled_se(e.std_error, r.capacity.std_error));
        }
        nlohmann::json j = r;
        CHECK(j.at("direction_indifferent") == true);
    }
}

TEST_CASE("simplex projection", "[optimizer]")
{
    Rng rng(127);
    CHECK(project_to_simplex({0.2, 0.3, 0.5}) == std::vector<double>{0.2, 0.3, 0.5});
    for (int trial = 0; trial < 500; ++trial) {
        const int m = 2 + trial % 6;
        std::vector<double> v(static_cast<std::size_t>(m));
        for (auto& x : v)
            x = 2.0 * rng.normal();
        const auto p = project_to_simplex(v);
        CHECK_THAT(std::accumulate(p.begin(), p.end(), 0.0), WithinAbs(1.0, 1e-12));
        // optimality: v - p is constant on the support and no larger off it
        double level = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p[i] >= 0.0);
            if (p[i] > 0.0)
                level = v[i] - p[i];
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] > 0.0)
                CHECK_THAT(v[i] - p[i], WithinAbs(level, 1e-12));
            else
                CHECK(v[i] <= level + 1e-12);
        }
    }
}

TEST_CASE("fixed-basis objective and sub-optimal search", "[optimizer]")
{
    const ChannelMeanModel fig1(test::fig1_mean(), 0.1);
    const auto rayleigh = FadingDistribution::rayleigh();
    const auto params = LinkParams::from_db(10.0, 15.0);

    SECTION("rotated basis sits at the requested angle")
    {
        for (double angle : {0.1, 0.5, 1.2}) {
            const CMatrix u = rotated_basis(fig1.mu(), angle);
            CHECK((u.adjoint() * u - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
            const double cosine = std::abs(u.col(0).dot(fig1.mu())) / fig1.mean_norm();
            CHECK_THAT(cosine, WithinAbs(std::cos(angle), 1e-12));
        }
    }
    SECTION("gradient matches central differences")
    {
        Rng rng(131);
        const CMatrix u = haar_unitary(3, rng);
        const ChannelMeanModel model(test::random_vector(3, rng), 0.3);
        const FixedBasisObjective objective(u, model, params, rayleigh, {20000, 17, 1});
        const std::vector<double> w{0.5, 0.3, 0.2};
        std::vector<double> grad;
        const double value = objective.value_and_gradient(w, grad);
        CHECK_THAT(value, WithinRel(objective(w).mean, 1e-12));
        REQUIRE(grad.size() == 3);
        const double h = 1e-6;
        for (std::size_t i = 0; i < 3; ++i) {
            auto up = w;
            auto down = w;
            up[i] += h;
            down[i] -= h;
            std::vector<double> unused;
            const double fd = (objective.value_and_gradient(up, unused) - objective.value_and_gradient(down, unused)) /
                              (2.0 * h);
            CHECK_THAT(grad[i], WithinRel(fd, 1e-5));
        }
    }
    SECTION("fixed basis agrees with the capacity estimator")
    {
        const CMatrix u = rotated_basis(fig1.mu(), 0.7);
        RVector w(2);
        w << 0.35, 0.65;
        const FixedBasisObjective objective(u, fig1, params, rayleigh, {300000, 19, 1});
        const auto a = objective({0.35, 0.65});
        const auto b = estimate_capacity(SourceCovariance(u, w), fig1, params, rayleigh, {300000, 23, 1});
        CHECK(std::abs(a.mean - b.mean) <= 3.0 * pooled_se(a.std_error, b.std_error));
    }
    SECTION("45 degree basis never beats the optimum")
    {
        const CMatrix u = rotated_basis(fig1.mu(), std::acos(-1.0) / 4.0);
        for (double gdb : {0.0, 15.0, 30.0}) {
            const auto p = LinkParams::from_db(gdb, 15.0);
            const auto opt = optimize_phi(fig1, p, rayleigh, search(200000, 29));
            const auto sub = optimize_suboptimal(u, fig1, p, rayleigh, search(200000, 29));
            CHECK(opt.capacity.mean >= sub.capacity.mean - 3.0 * pooled_se(opt.capacity.std_error, sub.capacity.std_error));
            CHECK_THAT(std::accumulate(sub.weights.begin(), sub.weights.end(), 0.0), WithinAbs(1.0, 1e-12));
        }
    }
    SECTION("random bases with more antennas")
    {
        Rng rng(137);
        const ChannelMeanModel model(test::random_vector(3, rng), 0.2);
        const auto opt = optimize_phi(model, params, rayleigh, search(100000, 31));
        for (int trial = 0; trial < 3; ++trial) {
            const auto sub = optimize_suboptimal(haar_unitary(3, rng), model, params, rayleigh, search(100000, 31));
            CHECK(opt.capacity.mean >= sub.capacity.mean - 3.0 * pooled_se(opt.capacity.std_error, sub.capacity.std_error));
            nlohmann::json j = sub;
            CHECK(j.contains("weights"));
        }
    }
    SECTION("zero mean: any basis reaches the optimal family")
    {
        Rng rng(139);
        const ChannelMeanModel zero(CVector::Zero(2), 0.5);
        const auto opt = optimize_phi(zero, params, rayleigh, search(200000, 37));
        const auto sub = optimize_suboptimal(haar_unitary(2, rng), zero, params, rayleigh, search(200000, 41));
        CHECK(std::abs(opt.capacity.mean - sub.capacity.mean) <=
              3.0 * pooled_se(opt.capacity.std_error, sub.capacity.std_error));
    }
    SECTION("aligned basis is rejected")
    {
        CHECK_THROWS_WITH(optimize_suboptimal(complete_orthonormal_basis(fig1.mu()), fig1, params, rayleigh,
                                              search(1000, 1)),
                          Catch::Matchers::ContainsSubstring("optimal family"));
    }
}
