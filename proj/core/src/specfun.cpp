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

#include "mfrelay/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mfrelay {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBesselSeriesLimit = 20.0;
constexpr double kAsymptoticE1Limit = 500.0;

double i0_series(double x)
{
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < kEps * sum)
            break;
    }
    return sum;
}

// exp(-x) I0(x) ~ (2 pi x)^{-1/2} sum_k [(2k-1)!!]^2 / (k! (8x)^k)
double i0_scaled_asymptotic(double x)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if (std::abs(next) >= std::abs(term))
            break;
        term = next;
        sum += term;
        if (term < kEps * sum)
            break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

// E1(x) = -gamma_E - ln x - sum_{k>=1} (-x)^k / (k k!), used for x <= 1.
double e1_series(double x)
{
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
        term *= -x / k;
        const double contrib = term / k;
        sum += contrib;
        if (std::abs(contrib) < kEps * std::abs(sum))
            break;
    }
    return -std::numbers::egamma - std::log(x) - sum;
}

// exp(x) E1(x) by the continued fraction 1/(x+1- 1/(x+3- 4/(x+5- ...))), modified Lentz.
double expx_e1_continued_fraction(double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps)
            return h;
    }
    throw std::runtime_error("expx_gamma0: continued fraction did not converge");
}

// exp(x) E1(x) ~ sum_k (-1)^k k! / x^{k+1}
double expx_e1_asymptotic(double x)
{
    double term = 1.0 / x;
    double sum = term;
    for (int k = 1; k < 100; ++k) {
        const double next = -term * k / x;
        if (std::abs(next) >= std::abs(term) || std::abs(next) < kEps * std::abs(sum))
            break;
        term = next;
        sum += term;
    }
    return sum;
}

void require_positive(double x, const char* who)
{
    if (!(x > 0.0))
        throw std::domain_error(std::string(who) + ": argument must be positive");
}

} // namespace

double bessel_i0_scaled(double x)
{
    if (!(x >= 0.0))
        throw std::domain_error("bessel_i0_scaled: argument must be nonnegative");
    if (std::isinf(x))
        return 0.0;
    if (x <= kBesselSeriesLimit)
        return std::exp(-x) * i0_series(x);
    return i0_scaled_asymptotic(x);
}

double gamma0(double x)
{
    require_positive(x, "gamma0");
    if (x <= 1.0)
        return e1_series(x);
    return std::exp(-x) * expx_gamma0(x);
}

double expx_gamma0(double x)
{
    require_positive(x, "expx_gamma0");
    if (x <= 1.0)
        return std::exp(x) * e1_series(x);
    if (x <= kAsymptoticE1Limit)
        return expx_e1_continued_fraction(x);
    return expx_e1_asymptotic(x);
}

double sample_ncx2(double noncentrality, Rng& rng)
{
    const auto g = rng.complex_normal();
    const double re = g.real() + std::sqrt(noncentrality);
    return re * re + g.imag() * g.imag();
}

double ncx2_density(double x, double noncentrality)
{
    if (x < 0.0)
        return 0.0;
    // exp(-(x + c)) I0(b) = exp(-(sqrt(c) - sqrt(x))^2) * [exp(-b) I0(b)], b = 2 sqrt(c x)
    const double root_c = std::sqrt(noncentrality);
    const double root_x = std::sqrt(x);
    const double gap = root_c - root_x;
    return std::exp(-gap * gap) * bessel_i0_scaled(2.0 * root_c * root_x);
}

void MixtureSpec::validate() const
{
    if (weights.size() != noncentralities.size() || weights.empty())
        throw std::invalid_argument("MixtureSpec: weights and noncentralities must have equal nonzero length");
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !(noncentralities[i] >= 0.0))
            throw std::invalid_argument("MixtureSpec: entries must be nonnegative");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("MixtureSpec: weights must sum to one");
}

double MixtureSpec::mean() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        m += weights[i] * (1.0 + noncentralities[i]);
    return m;
}

double log_mgf_mixture(const MixtureSpec& spec, double s)
{
    if (!(s > 0.0))
        throw std::domain_error("log_mgf_mixture: s must be positive");
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.weights.size(); ++i) {
        const double ws = spec.weights[i] * s;
        acc -= std::log1p(ws) + spec.noncentralities[i] * ws / (1.0 + ws);
    }
    return acc;
}

double mgf_mixture(const MixtureSpec& spec, double s) { return std::exp(log_mgf_mixture(spec, s)); }

double sample_mixture(const MixtureSpec& spec, Rng& rng)
{
    double w = 0.0;
    for (std::size_t i = 0; i < spec.weights.size(); ++i)
        w += spec.weights[i] * sample_ncx2(spec.noncentralities[i], rng);
    return w;
}

} // namespace mfrelay
