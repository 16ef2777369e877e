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

#include "mfrelay/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace mfrelay {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

ChannelMeanModel::ChannelMeanModel(CVector mu, double alpha) : mu_(std::move(mu)), alpha_(alpha)
{
    if (mu_.size() < 2)
        throw std::invalid_argument("ChannelMeanModel: at least two source antennas are required");
    if (!(alpha_ >= 0.0) || !std::isfinite(alpha_))
        throw std::invalid_argument("ChannelMeanModel: alpha must be finite and nonnegative");
    if (!mu_.allFinite())
        throw std::invalid_argument("ChannelMeanModel: mean vector has non-finite entries");
}

LinkParams::LinkParams(double gamma, double g_relay) : gamma_(gamma), g_relay_(g_relay)
{
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_))
        throw std::invalid_argument("LinkParams: gamma must be positive and finite");
    if (!(g_relay_ > 0.0) || !std::isfinite(g_relay_))
        throw std::invalid_argument("LinkParams: relay power G must be positive and finite");
}

LinkParams LinkParams::from_db(double gamma_db, double g_relay_db)
{
    return {db_to_linear(gamma_db), db_to_linear(g_relay_db)};
}

SourceCovariance::SourceCovariance(CMatrix matrix) : matrix_(std::move(matrix))
{
    if (matrix_.rows() != matrix_.cols())
        throw std::invalid_argument("SourceCovariance: matrix must be square");
}

SourceCovariance::SourceCovariance(CMatrix basis, RVector weights)
{
    if (basis.rows() != basis.cols() || basis.cols() != weights.size())
        throw std::invalid_argument("SourceCovariance: basis must be square and match the weight count");
    matrix_ = basis * weights.cast<cplx>().asDiagonal() * basis.adjoint();
    eigen_ = EigenForm{std::move(basis), std::move(weights)};
}

SourceCovariance SourceCovariance::isotropic(int antennas)
{
    return SourceCovariance(CMatrix::Identity(antennas, antennas),
                            RVector::Constant(antennas, 1.0 / antennas));
}

FadingDistribution::FadingDistribution(Kind kind, std::string name, Sampler sampler, cplx constant)
    : kind_(kind), name_(std::move(name)), sampler_(std::move(sampler)), constant_(constant)
{
}

FadingDistribution FadingDistribution::rayleigh()
{
    return {Kind::Rayleigh, "rayleigh", [](Rng& rng) { return rng.complex_normal(); }};
}

FadingDistribution FadingDistribution::constant(cplx value)
{
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw std::invalid_argument("FadingDistribution: constant must be finite");
    return {Kind::Constant, "constant", [value](Rng&) { return value; }, value};
}

FadingDistribution FadingDistribution::custom(std::string name, Sampler sampler)
{
    if (!sampler)
        throw std::invalid_argument("FadingDistribution: empty sampler");
    return {Kind::Custom, std::move(name), std::move(sampler)};
}

std::string CovarianceReport::describe() const
{
    std::ostringstream os;
    os << "hermitian=" << (hermitian ? "ok" : "violated") << " (" << hermitian_violation << ")"
       << ", psd=" << (psd ? "ok" : "violated") << " (" << psd_violation << ")"
       << ", trace=" << (unit_trace ? "ok" : "violated") << " (" << trace_violation << ")";
    if (!eigen_form_consistent)
        os << ", eigen form inconsistent (unitarity " << unitarity_violation << ", factors "
           << factor_violation << ")";
    return os.str();
}

CVector sample_backward_channel(const ChannelMeanModel& model, Rng& rng)
{
    CVector h = model.mu();
    if (model.alpha() == 0.0)
        return h;
    const double scale = std::sqrt(model.alpha());
    for (Eigen::Index i = 0; i < h.size(); ++i)
        h[i] += scale * rng.complex_normal();
    return h;
}

CMatrix complete_orthonormal_basis(const CVector& mu)
{
    const double norm = mu.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw std::invalid_argument("mean direction undefined");

    const Eigen::Index m = mu.size();
    const CVector u = mu / norm;
    const double lead = std::abs(u[0]);
    const cplx phase = lead > 0.0 ? u[0] / lead : cplx(1.0, 0.0);

    // Reflect e1 onto u' = conj(phase) u, whose first entry is real and nonnegative, then restore
    // the phase on the first column.
    double tail = 0.0;
    for (Eigen::Index i = 1; i < m; ++i)
        tail += std::norm(u[i]);

    CMatrix v = CMatrix::Identity(m, m);
    if (tail > 0.0) {
        CVector w(m);
        w[0] = tail / (1.0 + lead); // 1 - |u_1| without cancellation
        for (Eigen::Index i = 1; i < m; ++i)
            w[i] = -std::conj(phase) * u[i];
        const double wnorm_sq = w.squaredNorm();
        v -= (2.0 / wnorm_sq) * (w * w.adjoint());
    }
    // First column is conj(phase) u up to rounding; rotate it back and pin it to u exactly.
    v.col(0) = u;
    return v;
}

double quadratic_form(const CVector& h, const CMatrix& q)
{
    if (q.rows() != h.size() || q.cols() != h.size())
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    const cplx value = h.dot(q * h); // conjugates h
    return std::max(0.0, value.real());
}

double quadratic_form(const CVector& h, const SourceCovariance& q) { return quadratic_form(h, q.matrix()); }

CovarianceReport validate_covariance(const CMatrix& q)
{
    if (q.rows() != q.cols())
        throw std::invalid_argument("validate_covariance: matrix must be square");
    CovarianceReport report;
    report.hermitian_violation = (q - q.adjoint()).cwiseAbs().maxCoeff();
    report.hermitian = report.hermitian_violation <= kHermitianTol;

    const CMatrix sym = 0.5 * (q + q.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    report.psd_violation = std::max(0.0, -min_eig);
    report.psd = min_eig >= -kPsdTol;

    report.trace_violation = std::abs(q.trace().real() - 1.0);
    report.unit_trace = report.trace_violation <= kTraceTol;
    return report;
}

CovarianceReport validate_covariance(const SourceCovariance& q)
{
    CovarianceReport report = validate_covariance(q.matrix());
    if (const auto& form = q.eigen_form()) {
        const Eigen::Index m = form->basis.rows();
        report.unitarity_violation =
            (form->basis.adjoint() * form->basis - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
        const CMatrix rebuilt =
            form->basis * form->weights.cast<cplx>().asDiagonal() * form->basis.adjoint();
        report.factor_violation = (rebuilt - q.matrix()).cwiseAbs().maxCoeff();
        report.eigen_form_consistent = report.unitarity_violation <= kEigenFormTol &&
                                       report.factor_violation <= kEigenFormTol &&
                                       (form->weights.array() >= -kPsdTol).all();
    }
    return report;
}

CMatrix haar_unitary(int dimension, Rng& rng)
{
    CMatrix z(dimension, dimension);
    for (int c = 0; c < dimension; ++c)
        for (int r = 0; r < dimension; ++r)
            z(r, c) = rng.complex_normal();
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ() * CMatrix::Identity(dimension, dimension);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < dimension; ++i) {
        const double mag = std::abs(r(i, i));
        if (mag > 0.0)
            q.col(i) *= r(i, i) / mag;
    }
    return q;
}

} // namespace mfrelay
