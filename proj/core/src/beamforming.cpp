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

#include "mfrelay/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mfrelay/specfun.hpp"

namespace mfrelay {

namespace {

constexpr double kQuadTarget = 1e-11;
constexpr double kQuadRequired = 1e-6;
constexpr int kMaxSubdivisions = 4000;
constexpr double kSplitFraction = 0.1;
constexpr int kBisectionSteps = 200;

struct Piece {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

/// Globally adaptive Gauss-Kronrod (31-point rule from boost): repeatedly bisects the
/// subinterval with the largest error estimate until the summed error meets the relative target
/// on the summed value. Breakpoints seed the initial partition; a +infinity end is mapped by
/// x = a + s / (1 - s).
template <typename F>
Piece integrate_pieces(F f, const std::vector<double>& points)
{
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    struct Interval {
        double a, b, value, error, l1;
        bool operator<(const Interval& other) const { return error < other.error; }
    };

    const bool open_end = std::isinf(points.back());
    const double tail_start = open_end ? points[points.size() - 2] : 0.0;
    auto g = [&](double x) {
        if (!open_end || x < tail_start)
            return f(x);
        return 0.0;
    };
    auto tail = [&](double s) {
        if (s >= 1.0)
            return 0.0;
        const double one_minus = 1.0 - s;
        return f(tail_start + s / one_minus) / (one_minus * one_minus);
    };

    auto evaluate = [&](double a, double b, bool mapped) {
        Interval iv{a, b, 0.0, 0.0, 0.0};
        iv.value = mapped ? Rule::integrate(tail, a, b, 0, 0.0, &iv.error, &iv.l1)
                          : Rule::integrate(g, a, b, 0, 0.0, &iv.error, &iv.l1);
        return iv;
    };

    // mapped intervals live in s-space [0, 1]; tag them by a negative sentinel in a separate heap
    std::priority_queue<Interval> finite_heap;
    std::priority_queue<Interval> mapped_heap;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (open_end && i + 2 == points.size())
            mapped_heap.push(evaluate(0.0, 1.0, true));
        else if (points[i + 1] > points[i])
            finite_heap.push(evaluate(points[i], points[i + 1], false));
    }

    auto totals = [&]() {
        Piece p;
        for (auto heap : {finite_heap, mapped_heap}) {
            while (!heap.empty()) {
                p.value += heap.top().value;
                p.error += heap.top().error;
                p.l1 += heap.top().l1;
                heap.pop();
            }
        }
        return p;
    };

    Piece total = totals();
    for (int it = 0; it < kMaxSubdivisions; ++it) {
        if (total.error <= kQuadTarget * std::abs(total.value))
            break;
        const bool pick_mapped =
            !mapped_heap.empty() && (finite_heap.empty() || mapped_heap.top().error > finite_heap.top().error);
        auto& heap = pick_mapped ? mapped_heap : finite_heap;
        const Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Interval left = evaluate(worst.a, mid, pick_mapped);
        const Interval right = evaluate(mid, worst.b, pick_mapped);
        heap.push(left);
        heap.push(right);
        total.value += left.value + right.value - worst.value;
        total.error += left.error + right.error - worst.error;
        total.l1 += left.l1 + right.l1 - worst.l1;
    }
    return totals();
}

/// Breakpoints in [a, b] at the images of the ncx2 bulk, so narrow peaks are never stepped over.
template <typename Map>
std::vector<double> with_bulk_points(double a, double b, double noncentrality, Map y_to_x)
{
    std::vector<double> pts{a, b};
    const double sd = std::sqrt(1.0 + 2.0 * noncentrality);
    for (double k : {-8.0, -3.0, 0.0, 3.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
        const double y = noncentrality + 1.0 + k * sd;
        if (y <= 0.0)
            continue;
        const double x = y_to_x(y);
        if (x > a && x < b)
            pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

/// E[h(Z)] by the split/transform scheme; h is evaluated at z in (0, d1].
template <typename H>
Piece expectation(const BeamformingInstance& inst, H h)
{
    const double d1 = inst.d1;
    const double ag = inst.model.alpha() * inst.params.gamma();
    const double c = inst.model.mean_norm_sq() / inst.model.alpha();
    const double split = kSplitFraction * d1;

    // upper piece, z in [d1/10, d1], integrated in y = (d1/z - 1)/ag where p(z) dz = ncx2(y) dy;
    // the z-space integrand is too steep near d1 when ag is small
    auto upper = [&](double y) { return h(d1 / (1.0 + ag * y)) * ncx2_density(y, c); };
    const double y_split = (1.0 / kSplitFraction - 1.0) / ag;
    const auto upper_pts = with_bulk_points(0.0, y_split, c, [](double y) { return y; });
    const Piece p_upper = integrate_pieces(upper, upper_pts);

    // lower piece, u = 1/z in [10/d1, inf): p(z) dz = d1/(ag) ncx2((d1 u - 1)/ag) du
    const double scale = d1 / ag;
    auto lower = [&](double u) {
        if (!std::isfinite(u))
            return 0.0;
        const double density = ncx2_density((d1 * u - 1.0) / ag, c);
        if (density == 0.0)
            return 0.0;
        return h(1.0 / u) * scale * density;
    };
    const double u0 = 1.0 / split;
    auto lower_pts = with_bulk_points(u0, std::numeric_limits<double>::max(), c,
                                      [&](double y) { return (1.0 + ag * y) / d1; });
    lower_pts.back() = std::numeric_limits<double>::infinity();
    const Piece p_lower = integrate_pieces(lower, lower_pts);

    return {p_upper.value + p_lower.value, p_upper.error + p_lower.error, p_upper.l1 + p_lower.l1};
}

double relative_error(const Piece& p)
{
    const double denom = std::max(std::abs(p.value), std::numeric_limits<double>::min());
    return p.error / denom;
}

} // namespace

BeamformingInstance make_bf_instance(const ChannelMeanModel& model, const LinkParams& params)
{
    if (!(model.alpha() > 0.0))
        throw std::invalid_argument("make_bf_instance: alpha must be positive");
    const double alpha = model.alpha();
    const double gamma = params.gamma();
    const double g = params.g_relay();
    const double norm_sq = model.mean_norm_sq();
    const double d1 = (alpha * gamma + 1.0 + gamma * norm_sq) / g;
    const double d2 = d1 / (alpha * gamma + 1.0) * (1.0 - (gamma * norm_sq / g) * expx_gamma0(d1));
    return {model, params, d1, d2};
}

double pz_density(double z, const BeamformingInstance& inst)
{
    if (!(z > 0.0) || z > inst.d1)
        throw std::domain_error("pz_density: z must lie in (0, d1]");
    const double ag = inst.model.alpha() * inst.params.gamma();
    const double y = (inst.d1 / z - 1.0) / ag;
    const double density = ncx2_density(y, inst.model.mean_norm_sq() / inst.model.alpha());
    if (density == 0.0)
        return 0.0;
    return inst.d1 / (ag * z) / z * density;
}

BfExpectations bf_expectations(const BeamformingInstance& inst)
{
    BfExpectations out;
    const Piece mass = expectation(inst, [](double) { return 1.0; });
    const Piece ez = expectation(inst, [](double z) { return z; });
    const Piece ezg = expectation(inst, [](double z) { return z * expx_gamma0(z); });
    const Piece ez2g = expectation(inst, [](double z) { return z * z * expx_gamma0(z); });
    out.mass = mass.value;
    out.e_z = ez.value;
    out.e_z_expg = ezg.value;
    out.e_z2_expg = ez2g.value;
    out.max_rel_error = std::max({relative_error(mass), relative_error(ez), relative_error(ezg),
                                  relative_error(ez2g)});
    if (!(out.max_rel_error <= kQuadRequired))
        throw QuadratureError("bf_expectations: quadrature did not converge, achieved relative error " +
                                  std::to_string(out.max_rel_error),
                              out.max_rel_error);
    return out;
}

double f_gamma(double gamma, const ChannelMeanModel& model, double g_relay)
{
    const auto inst = make_bf_instance(model, LinkParams(gamma, g_relay));
    const auto e = bf_expectations(inst);
    return e.e_z + e.e_z_expg / g_relay - e.e_z2_expg - inst.d2;
}

double bf_threshold(const ChannelMeanModel& model, double g_relay, const GammaBracket& bracket)
{
    if (!(bracket.lo > 0.0) || !(bracket.hi > bracket.lo))
        throw std::invalid_argument("bf_threshold: bracket must satisfy 0 < lo < hi");
    double lo = std::log(bracket.lo);
    double hi = std::log(bracket.hi);
    const double f_lo = f_gamma(bracket.lo, model, g_relay);
    const double f_hi = f_gamma(bracket.hi, model, g_relay);
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw NoSignChange("beamforming optimal (or suboptimal) throughout bracket");
    const bool rising = f_lo <= 0.0;
    for (int i = 0; i < kBisectionSteps && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f_gamma(std::exp(mid), model, g_relay);
        if ((f_mid <= 0.0) == rising)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

} // namespace mfrelay
