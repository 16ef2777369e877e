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

#include <complex>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "mfrelay/rng.hpp"

namespace mfrelay {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Tolerances used when validating a source covariance.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kEigenFormTol = 1e-10;

/// Converts a power ratio in dB to linear units, 10^(dB/10).
double db_to_linear(double db);
double linear_to_db(double linear);

/// Backward (source-to-relay) channel statistics known at the source: h_B = mu + sqrt(alpha) h_w.
class ChannelMeanModel {
public:
    /// Throws std::invalid_argument when M < 2, alpha < 0 or any entry is not finite.
    ChannelMeanModel(CVector mu, double alpha);

    const CVector& mu() const { return mu_; }
    double alpha() const { return alpha_; }
    int antennas() const { return static_cast<int>(mu_.size()); }
    double mean_norm_sq() const { return mu_.squaredNorm(); }
    double mean_norm() const { return mu_.norm(); }

private:
    CVector mu_;
    double alpha_;
};

/// Transmit SNR gamma and relay power budget G, both linear.
class LinkParams {
public:
    LinkParams(double gamma, double g_relay);

    static LinkParams from_db(double gamma_db, double g_relay_db);

    double gamma() const { return gamma_; }
    double g_relay() const { return g_relay_; }

private:
    double gamma_;
    double g_relay_;
};

/// Hermitian PSD source covariance Q, optionally carried in factored form basis * diag(weights) * basis^H.
class SourceCovariance {
public:
    struct EigenForm {
        CMatrix basis;
        RVector weights;
    };

    explicit SourceCovariance(CMatrix matrix);
    /// Builds the matrix from its factors; the factors are kept for validation and reporting.
    SourceCovariance(CMatrix basis, RVector weights);

    static SourceCovariance isotropic(int antennas);

    const CMatrix& matrix() const { return matrix_; }
    const std::optional<EigenForm>& eigen_form() const { return eigen_; }
    int dimension() const { return static_cast<int>(matrix_.rows()); }
    double trace() const { return matrix_.trace().real(); }

private:
    CMatrix matrix_;
    std::optional<EigenForm> eigen_;
};

/// Law of the forward (relay-to-destination) coefficient h_F.
class FadingDistribution {
public:
    using Sampler = std::function<cplx(Rng&)>;

    /// Unit circularly-symmetric complex Gaussian, E|h_F|^2 = 1.
    static FadingDistribution rayleigh();
    static FadingDistribution constant(cplx value);
    /// Extension point for other laws; the sampler must return finite values.
    static FadingDistribution custom(std::string name, Sampler sampler);

    cplx sample(Rng& rng) const { return sampler_(rng); }
    const std::string& name() const { return name_; }
    bool is_rayleigh() const { return kind_ == Kind::Rayleigh; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    /// Only meaningful for the constant law.
    cplx constant_value() const { return constant_; }

private:
    enum class Kind { Rayleigh, Constant, Custom };

    FadingDistribution(Kind kind, std::string name, Sampler sampler, cplx constant = {});

    Kind kind_;
    std::string name_;
    Sampler sampler_;
    cplx constant_;
};

struct CovarianceReport {
    double hermitian_violation = 0.0; ///< max |Q - Q^H|
    double psd_violation = 0.0;       ///< max(0, -lambda_min)
    double trace_violation = 0.0;     ///< |tr Q - 1|
    double unitarity_violation = 0.0; ///< max |V^H V - I|, eigen form only
    double factor_violation = 0.0;    ///< max |Q - V diag(w) V^H|, eigen form only
    bool hermitian = true;
    bool psd = true;
    bool unit_trace = true;
    bool eigen_form_consistent = true;

    bool ok() const { return hermitian && psd && unit_trace && eigen_form_consistent; }
    std::string describe() const;
};

/// mu + sqrt(alpha) g with g ~ CN(0, I_M).
CVector sample_backward_channel(const ChannelMeanModel& model, Rng& rng);

/// Unitary V whose first column is mu / ||mu||, built from one complex Householder reflector.
/// Throws std::invalid_argument("mean direction undefined") for a zero vector.
CMatrix complete_orthonormal_basis(const CVector& mu);

/// h^H Q h, clipped at zero. Throws std::invalid_argument on a dimension mismatch.
double quadratic_form(const CVector& h, const CMatrix& q);
double quadratic_form(const CVector& h, const SourceCovariance& q);

/// Throws std::invalid_argument for a non-square matrix; never mutates its input.
CovarianceReport validate_covariance(const CMatrix& q);
CovarianceReport validate_covariance(const SourceCovariance& q);

/// Haar-distributed unitary (QR of a complex Gaussian matrix with the R-diagonal phases removed).
CMatrix haar_unitary(int dimension, Rng& rng);

} // namespace mfrelay
