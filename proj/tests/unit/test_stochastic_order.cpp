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

#include <nlohmann/json.hpp>

#include "mfrelay/stochastic_order.hpp"
#include "test_support.hpp"

using namespace mfrelay;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ComparisonInstance two_antenna(std::vector<double> lambda, cplx b0, cplx b1, double alpha)
{
    CVector beta(2);
    beta << b0, b1;
    return make_matched_instance(std::move(lambda), beta, alpha);
}

} // namespace

TEST_CASE("phi_hat matching", "[stochastic_order]")
{
    Rng rng(31);
    SECTION("uniform eigenvalues give 1/M for any beta")
    {
        for (int m = 2; m <= 6; ++m) {
            const std::vector<double> uniform(static_cast<std::size_t>(m), 1.0 / m);
            CHECK_THAT(phi_hat_from_q1(uniform, test::random_vector(m, rng)), WithinRel(1.0 / m, 1e-14));
        }
    }
    SECTION("always within the eigenvalue range")
    {
        for (int trial = 0; trial < 500; ++trial) {
            const int m = 2 + trial % 5;
            const auto lambda = test::random_simplex(m, rng);
            const double phi = phi_hat_from_q1(lambda, test::random_vector(m, rng));
            CHECK(phi >= *std::min_element(lambda.begin(), lambda.end()) - 1e-15);
            CHECK(phi <= *std::max_element(lambda.begin(), lambda.end()) + 1e-15);
        }
    }
    SECTION("invalid input")
    {
        CHECK_THROWS_AS(phi_hat_from_q1({0.5, 0.5}, CVector::Zero(2)), std::invalid_argument);
        CHECK_THROWS_AS(phi_hat_from_q1({0.5, 0.5}, test::random_vector(3, rng)), std::invalid_argument);
    }
}

TEST_CASE("J and R functions", "[stochastic_order]")
{
    SECTION("hand evaluation for lambda = (1, 0), beta along (1, 1)")
    {
        const double r = 1.0 / std::sqrt(2.0);
        const auto inst = two_antenna({1.0, 0.0}, r, r, 0.5);
        CHECK_THAT(inst.phi_hat1, WithinRel(0.5, 1e-15));
        CHECK_THAT(j_function(inst, 1.0), WithinRel(std::log(8.0 / 9.0), 1e-14));
    }
    SECTION("identical spectra give zero")
    {
        const auto inst = two_antenna({0.5, 0.5}, cplx(0.3, 0.1), cplx(-0.2, 0.9), 0.7);
        for (double s : LogGrid{}.values()) {
            CHECK_THAT(j_function(inst, s), WithinAbs(0.0, 1e-14));
            CHECK_THAT(log_mgf_ratio(inst, s), WithinAbs(0.0, 1e-10));
        }
    }
    SECTION("R vanishes as s -> 0 under the matching")
    {
        Rng rng(37);
        for (int trial = 0; trial < 50; ++trial) {
            const auto inst = random_matched_instance(2 + trial % 5, rng);
            CHECK_THAT(r_function(inst, 1e-12), WithinAbs(0.0, 1e-9));
        }
    }
    SECTION("domain errors")
    {
        const auto inst = two_antenna({0.3, 0.7}, 1.0, 0.5, 0.2);
        CHECK_THROWS_AS(j_function(inst, 0.0), std::domain_error);
        CHECK_THROWS_AS(r_function(inst, -1.0), std::domain_error);
        auto deterministic = inst;
        deterministic.alpha = 0.0;
        CHECK_THROWS_WITH(log_mgf_ratio(deterministic, 1.0),
                          Catch::Matchers::ContainsSubstring("ordering trivial"));
    }
}

TEST_CASE("log-MGF ratio agrees with the mixture transforms", "[stochastic_order]")
{
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = random_matched_instance(2 + trial % 5, rng);
        const auto spec1 = w_q1_spec(inst);
        const auto spec2 = w_q2_spec(inst);
        CHECK_NOTHROW(spec1.validate());
        CHECK_NOTHROW(spec2.validate());
        // matched instances give equal means: E W = sum w_i (1 + c_i) = 1 + phi ||mu||^2 / alpha
        CHECK_THAT(spec1.mean(), WithinRel(spec2.mean(), 1e-12));
        for (double s : {1e-3, 0.05, 1.0, 30.0, 1e3}) {
            const double direct = log_mgf_mixture(spec2, s) - log_mgf_mixture(spec1, s);
            CHECK_THAT(log_mgf_ratio(inst, s), WithinAbs(direct, 1e-10));
        }
    }
}

TEST_CASE("Laplace transform order", "[stochastic_order]")
{
    SECTION("log grid")
    {
        const auto g = LogGrid{}.values();
        REQUIRE(g.size() == 200);
        CHECK_THAT(g.front(), WithinRel(1e-3, 1e-14));
        CHECK_THAT(g.back(), WithinRel(1e3, 1e-14));
        CHECK(std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end());
    }
    SECTION("uniform instance is ordered with zero margin")
    {
        const auto report = lt_order_check(two_antenna({0.5, 0.5}, 1.0, 0.2, 0.3));
        CHECK(report.ordered);
        CHECK_THAT(report.max_violation, WithinAbs(0.0, 1e-12));
    }
    SECTION("mismatched phi_hat is flagged")
    {
        ComparisonInstance counter;
        counter.lambda = {0.5, 0.5};
        counter.beta = CVector::Zero(2);
        counter.beta[0] = 1.0;
        counter.alpha = 1.0;
        counter.phi_hat1 = 1.0;
        const auto report = lt_order_check(counter);
        CHECK_FALSE(report.ordered);
        CHECK(report.max_violation > 1.0);
        nlohmann::json j = report;
        CHECK(j.at("verdict") == "violated");
    }
    SECTION("random matched instances are ordered; J <= 0 <= R on the grid")
    {
        Rng rng(43);
        const auto grid = LogGrid{}.values();
        for (int trial = 0; trial < 300; ++trial) {
            const auto inst = random_matched_instance(2 + trial % 5, rng);
            const auto report = lt_order_check(inst);
            CHECK(report.ordered);
            CHECK(report.max_violation <= kLtViolationTol);
            CHECK(report.log_ratio.size() == grid.size());
            for (double s : grid) {
                CHECK(j_function(inst, s) <= 1e-12);
                CHECK(r_function(inst, s) >= -1e-12);
            }
        }
    }
}

TEST_CASE("majorization", "[stochastic_order]")
{
    Rng rng(47);
    const std::vector<double> uniform(4, 0.25);
    for (int trial = 0; trial < 200; ++trial) {
        const auto b = test::random_simplex(4, rng);
        CHECK(majorization_check(b, b));
        CHECK(majorization_check(uniform, b));
    }
    CHECK_FALSE(majorization_check({1.0, 0.0}, {0.5, 0.5}));
    CHECK_THROWS_AS(majorization_check({0.5, 0.5}, {1.0, 0.0, 0.0}), std::invalid_argument);

    const auto profile = equal_tail_profile(0.4, 4);
    REQUIRE(profile.size() == 4);
    CHECK(profile[0] == 0.4);
    for (std::size_t i = 1; i < 4; ++i)
        CHECK_THAT(profile[i], WithinRel(0.2, 1e-15));

    for (int trial = 0; trial < 500; ++trial) {
        const int m = 2 + trial % 5;
        const auto inst = random_matched_instance(m, rng);
        CHECK(majorization_check(equal_tail_profile(inst.phi_hat1, m), inst.lambda));
    }
}

TEST_CASE("log(1 + dW) expectations follow the order", "[stochastic_order]")
{
    Rng rng(53);
    SECTION("identical laws")
    {
        const MixtureSpec spec{{0.3, 0.7}, {1.0, 0.5}};
        const auto report = lemma1_check(spec, spec, 2.0, 200000, rng);
        CHECK(report.holds);
        CHECK(std::abs(report.mean1 - report.mean2) <= 3.0 * report.combined_se);
        CHECK(report.samples == 200000);
    }
    SECTION("ordered instance")
    {
        const auto inst = random_matched_instance(3, rng);
        REQUIRE(lt_order_check(inst).ordered);
        const auto report = lemma1_check(w_q1_spec(inst), w_q2_spec(inst), 5.0, 200000, rng);
        CHECK(report.holds);
        nlohmann::json j = report;
        CHECK(j.contains("combined_se"));
    }
}
