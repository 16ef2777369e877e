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

#include <cmath>
#include <numbers>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "mfrelay/specfun.hpp"
#include "mfrelay/stats.hpp"
#include "test_support.hpp"

using namespace mfrelay;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// e^-x I0(x) from sum (x/2)^(2k) / (k!)^2, summed until the terms stop changing the total
double i0_scaled_series(double x)
{
    double term = 1.0;
    double sum = 1.0;
    const double q = 0.25 * x * x;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return sum * std::exp(-x);
}

double e1_quadrature(double x)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([x](double t) { return std::exp(-(x + t)) / (x + t); }, 0.0,
                                std::numeric_limits<double>::infinity());
}

} // namespace

TEST_CASE("scaled Bessel I0", "[specfun]")
{
    CHECK(bessel_i0_scaled(0.0) == 1.0);
    CHECK_THAT(bessel_i0_scaled(1.0), WithinRel(i0_scaled_series(1.0), 1e-14));
    CHECK_THROWS_AS(bessel_i0_scaled(-1.0), std::domain_error);

    SECTION("series oracle for small and moderate arguments")
    {
        for (double x = 0.0; x <= 30.0; x += 0.37)
            CHECK_THAT(bessel_i0_scaled(x), WithinRel(i0_scaled_series(x), 1e-13));
    }
    SECTION("boost cyl_bessel_i on the unscaled range")
    {
        for (double x : {0.01, 0.5, 3.0, 12.0, 19.99, 20.0, 20.01, 45.0, 150.0, 400.0, 700.0})
            CHECK_THAT(bessel_i0_scaled(x), WithinRel(std::exp(-x) * boost::math::cyl_bessel_i(0, x), 1e-13));
    }
    SECTION("asymptotic oracle at large arguments, no overflow")
    {
        CHECK_THAT(bessel_i0_scaled(700.0), WithinRel(1.0 / std::sqrt(2.0 * std::numbers::pi * 700.0), 1e-3));
        for (double x : {1e4, 1e6, 1e12, 1e300}) {
            const double v = bessel_i0_scaled(x);
            REQUIRE(std::isfinite(v));
            const double lead = 1.0 / std::sqrt(2.0 * std::numbers::pi * x);
            CHECK_THAT(v, WithinRel(lead * (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)), 1e-12));
        }
    }
    SECTION("monotonically decreasing")
    {
        double prev = bessel_i0_scaled(0.0);
        for (double x = 0.05; x < 200.0; x *= 1.07) {
            const double v = bessel_i0_scaled(x);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("Gamma(0, x)", "[specfun]")
{
    CHECK_THROWS_AS(gamma0(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma0(-2.0), std::domain_error);
    CHECK_THROWS_AS(expx_gamma0(0.0), std::domain_error);

    SECTION("quadrature oracle at x = 1")
    {
        CHECK_THAT(gamma0(1.0), WithinRel(e1_quadrature(1.0), 1e-10));
    }
    SECTION("small-x expansion")
    {
        const double x = 1e-6;
        CHECK_THAT(gamma0(x), WithinRel(-std::log(x) - std::numbers::egamma + x, 1e-6));
    }
    SECTION("upper bound e^-x / x")
    {
        CHECK(gamma0(50.0) <= std::exp(-50.0) / 50.0);
        CHECK(gamma0(800.0) >= 0.0);
    }
    SECTION("boost expint across the series, fraction and asymptotic regimes")
    {
        for (double x : {1e-8, 1e-3, 0.3, 0.999, 1.0, 1.001, 2.5, 10.0, 60.0, 300.0, 499.0, 501.0, 700.0})
            CHECK_THAT(gamma0(x), WithinRel(boost::math::expint(1, x), 1e-13));
    }
}

TEST_CASE("exp(x) Gamma(0, x)", "[specfun]")
{
    CHECK_THAT(expx_gamma0(1.0), WithinRel(std::exp(1.0) * gamma0(1.0), 1e-12));
    CHECK(expx_gamma0(2.0) < expx_gamma0(1.0));

    const double x = 1000.0;
    CHECK_THAT(expx_gamma0(x), WithinRel(1.0 / x - 1.0 / (x * x) + 2.0 / (x * x * x), 1e-6));

    SECTION("matches boost through the moderate range")
    {
        for (double y : {1e-6, 0.2, 1.0, 5.0, 50.0, 200.0, 499.0, 501.0, 650.0})
            CHECK_THAT(expx_gamma0(y), WithinRel(std::exp(y) * boost::math::expint(1, y), 1e-12));
    }
    SECTION("classical bounds x/(x+1) < x e^x Gamma(0,x) < 1 and strict decrease")
    {
        double prev = std::numeric_limits<double>::infinity();
        for (double y = 1e-8; y < 1e8; y *= 1.3) {
            const double v = expx_gamma0(y);
            CHECK(y * v < 1.0);
            CHECK(y * v > y / (y + 1.0));
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("noncentral chi-square(2) sampling", "[specfun]")
{
    Rng rng(23);
    auto moments = [&](double c) {
        RunningStats s;
        RunningStats sq;
        for (int i = 0; i < 1'000'000; ++i) {
            const double x = sample_ncx2(c, rng);
            REQUIRE(x >= 0.0);
            s.add(x);
            sq.add((x - (1.0 + c)) * (x - (1.0 + c)));
        }
        return std::pair{s, sq};
    };
    SECTION("c = 0 is a unit exponential")
    {
        const auto [s, sq] = moments(0.0);
        CHECK(std::abs(s.mean() - 1.0) <= 3.0 * s.std_error());
    }
    SECTION("figure noncentrality: mean 1 + c")
    {
        const auto [s, sq] = moments(14.3851);
        CHECK(std::abs(s.mean() - 15.3851) <= 3.0 * s.std_error());
    }
    SECTION("c = 5: variance 1 + 2c")
    {
        const auto [s, sq] = moments(5.0);
        CHECK(std::abs(sq.mean() - 11.0) <= 3.0 * sq.std_error());
    }
}

TEST_CASE("noncentral chi-square(2) density", "[specfun]")
{
    for (double c : {0.0, 0.3, 2.87, 14.3851, 400.0}) {
        // x here is half of a standard ncx2(2, 2c) variate
        const boost::math::non_central_chi_squared_distribution<double> standard(2.0, 2.0 * c);
        for (double x : {1e-6, 0.1, 1.0, c + 1.0, 2.0 * c + 5.0}) {
            const double expected = 2.0 * boost::math::pdf(standard, 2.0 * x);
            if (expected > 1e-280)
                CHECK_THAT(ncx2_density(x, c), WithinRel(expected, 1e-10));
        }
        // finite piece over the bulk, then the tail, so a narrow peak is not stepped over
        auto density = [c](double x) { return ncx2_density(x, c); };
        const double cut = c + 1.0 + 40.0 * std::sqrt(1.0 + 2.0 * c);
        boost::math::quadrature::tanh_sinh<double> bulk;
        boost::math::quadrature::exp_sinh<double> tail;
        const double mass = bulk.integrate(density, 0.0, cut) +
                            tail.integrate(density, cut, std::numeric_limits<double>::infinity());
        CHECK_THAT(mass, WithinAbs(1.0, 1e-9));
    }
    CHECK(ncx2_density(-1.0, 1.0) == 0.0);
    CHECK(std::isfinite(ncx2_density(1e5, 1e5)));
}

TEST_CASE("mixture Laplace transforms", "[specfun]")
{
    SECTION("validation")
    {
        CHECK_THROWS_AS((MixtureSpec{{0.5, 0.6}, {0.0, 0.0}}.validate()), std::invalid_argument);
        CHECK_THROWS_AS((MixtureSpec{{0.5, 0.5}, {0.0}}.validate()), std::invalid_argument);
        CHECK_THROWS_AS((MixtureSpec{{1.5, -0.5}, {0.0, 0.0}}.validate()), std::invalid_argument);
        CHECK_THROWS_AS((MixtureSpec{{0.5, 0.5}, {0.0, -1.0}}.validate()), std::invalid_argument);
        CHECK_THROWS_AS(mgf_mixture(MixtureSpec{{1.0}, {0.0}}, 0.0), std::domain_error);
    }
    SECTION("exponential variable and near-zero argument")
    {
        CHECK_THAT(mgf_mixture(MixtureSpec{{1.0}, {0.0}}, 1.0), WithinRel(0.5, 1e-15));
        CHECK_THAT(mgf_mixture(MixtureSpec{{0.2, 0.3, 0.5}, {4.0, 0.0, 1.0}}, 1e-12), WithinAbs(1.0, 1e-9));
    }
    SECTION("single component equals the integral of the density")
    {
        boost::math::quadrature::exp_sinh<double> integrator;
        for (double c : {0.0, 1.0, 6.5}) {
            for (double s : {0.01, 0.7, 9.0}) {
                const double direct = integrator.integrate(
                    [=](double x) { return std::exp(-s * x) * ncx2_density(x, c); }, 0.0,
                    std::numeric_limits<double>::infinity());
                CHECK_THAT(mgf_mixture(MixtureSpec{{1.0}, {c}}, s), WithinRel(direct, 1e-9));
            }
        }
    }
    SECTION("term-by-term identity of the log form")
    {
        const MixtureSpec spec{{0.1, 0.6, 0.3}, {2.0, 0.5, 0.0}};
        for (double s : {1e-3, 0.4, 7.0, 1e3}) {
            double expected = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                const double ws = spec.weights[i] * s;
                expected -= std::log1p(ws) + spec.noncentralities[i] * ws / (1.0 + ws);
            }
            CHECK_THAT(log_mgf_mixture(spec, s), WithinRel(expected, 1e-15));
        }
    }
    SECTION("Monte Carlo oracle at s = 0.7")
    {
        Rng rng(29);
        const auto w = test::random_simplex(3, rng);
        const MixtureSpec spec{w, {3.0 * rng.uniform(), 3.0 * rng.uniform(), 3.0 * rng.uniform()}};
        CHECK_THAT(spec.mean(), WithinRel(w[0] * (1 + spec.noncentralities[0]) + w[1] * (1 + spec.noncentralities[1]) +
                                              w[2] * (1 + spec.noncentralities[2]),
                                          1e-14));
        const double s = 0.7;
        RunningStats mc;
        for (int i = 0; i < 10'000'000; ++i)
            mc.add(std::exp(-s * sample_mixture(spec, rng)));
        CHECK(std::abs(mc.mean() - mgf_mixture(spec, s)) <= 3.0 * mc.std_error());
    }
    SECTION("strictly decreasing and convex on a grid")
    {
        const MixtureSpec spec{{0.25, 0.25, 0.5}, {1.0, 3.0, 0.2}};
        const double h = 1e-3;
        for (double s = 0.01; s < 50.0; s *= 1.25) {
            const double lo = mgf_mixture(spec, s - h * s);
            const double mid = mgf_mixture(spec, s);
            const double hi = mgf_mixture(spec, s + h * s);
            CHECK(hi < mid);
            CHECK(mid < lo);
            CHECK(lo + hi - 2.0 * mid >= -1e-15);
        }
    }
}
