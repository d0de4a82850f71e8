// Copyright 2026 The qntomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qntomo/distribution.hpp"
#include "qntomo/error.hpp"
#include "qntomo/estimators.hpp"
#include "qntomo/labels.hpp"

namespace qntomo {

/**
 * Eigenvalues of a scheme state whose eigenbasis does not depend on theta.
 *
 * Each eigenvalue is a sum of monomials prod_a (theta_a or 1 - theta_a); a
 * monomial is stored as the mask of channels contributing (1 - theta_a).
 */
struct EigenvalueModel {
    SchemePreset scheme = SchemePreset::ZBasis;
    int n = 0;
    LabelKind kind = LabelKind::Bits;
    int qubits = 0;
    std::vector<std::vector<std::uint64_t>> monomials;  // per label

    [[nodiscard]] std::size_t labels() const { return monomials.size(); }

    [[nodiscard]] Eigen::VectorXd eigenvalues(const std::vector<double> &theta) const {
        check(theta);
        Eigen::VectorXd lam = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(labels()));
        for (std::size_t k = 0; k < labels(); ++k) {
            for (auto mask : monomials[k]) lam(static_cast<Eigen::Index>(k)) += monomial(theta, mask, -1);
        }
        return lam;
    }

    /// d lambda_k / d theta_a by the product rule; rows are labels.
    [[nodiscard]] Eigen::MatrixXd gradients(const std::vector<double> &theta) const {
        check(theta);
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels()), n);
        for (std::size_t k = 0; k < labels(); ++k) {
            for (auto mask : monomials[k]) {
                for (int a = 0; a < n; ++a) {
                    const double sign = ((mask >> a) & 1U) ? -1.0 : 1.0;
                    g(static_cast<Eigen::Index>(k), a) += sign * monomial(theta, mask, a);
                }
            }
        }
        return g;
    }

  private:
    void check(const std::vector<double> &theta) const {
        if (static_cast<int>(theta.size()) != n) {
            throw Error(ErrorCode::InvalidParameter, "theta has wrong length for eigenvalue model");
        }
    }

    // Product over channels, skipping channel `skip` (-1 for none).
    [[nodiscard]] double monomial(const std::vector<double> &theta, std::uint64_t mask, int skip) const {
        double v = 1.0;
        for (int a = 0; a < n; ++a) {
            if (a == skip) continue;
            const double t = theta[static_cast<std::size_t>(a)];
            v *= ((mask >> a) & 1U) ? (1.0 - t) : t;
        }
        return v;
    }
};

/// alpha(s) = theta_0 prod[no flip on 0] + (1 - theta_0) prod[flip on 0] over n-1 measured bits.
inline EigenvalueModel z_scheme_model(int n) {
    if (n < 2 || n > 20) throw Error(ErrorCode::InvalidParameter, "Z-scheme model needs 2..20 channels");
    EigenvalueModel m{SchemePreset::ZBasis, n, LabelKind::Bits, n - 1, {}};
    const int w = n - 1;
    for (LabelIndex s = 0; s < label_count(w); ++s) {
        std::uint64_t direct = 0;  // channel 0 clean: channel j flipped iff s_j = 1
        for (int j = 1; j < n; ++j) {
            if ((s >> (w - j)) & 1U) direct |= std::uint64_t{1} << j;
        }
        const std::uint64_t all_j = ((std::uint64_t{1} << n) - 1) & ~std::uint64_t{1};
        const std::uint64_t mirrored = 1U | (~direct & all_j);
        m.monomials.push_back({direct, mirrored});
    }
    return m;
}

/**
 * GHZ-basis eigenvalues. X and Z channels: lambda(s, b) has b as the channel-0
 * flip and s_j as the channel-j flip. Y channels: a flip on any channel toggles
 * b, a flip on channel 0 toggles all of s, a flip on channel j toggles s_j.
 */
inline EigenvalueModel ghz_model(int n, PauliAxis axis) {
    if (n < 1 || n > 20) throw Error(ErrorCode::InvalidParameter, "GHZ model needs 1..20 channels");
    const SchemePreset preset =
        axis == PauliAxis::X ? SchemePreset::GhzX : (axis == PauliAxis::Y ? SchemePreset::GhzY : SchemePreset::GhzZ);
    EigenvalueModel m{preset, n, LabelKind::Ghz, n, {}};
    for (LabelIndex idx = 0; idx < label_count(n); ++idx) {
        const auto l = GhzLabel::unpack(n, idx);
        std::vector<std::uint64_t> terms;
        if (axis != PauliAxis::Y) {
            std::uint64_t mask = static_cast<std::uint64_t>(l.b);
            for (int j = 1; j < n; ++j) mask |= static_cast<std::uint64_t>(l.s_bit(j)) << j;
            terms.push_back(mask);
        } else {
            for (int f0 = 0; f0 <= 1; ++f0) {
                std::uint64_t mask = static_cast<std::uint64_t>(f0);
                int parity = f0;
                for (int j = 1; j < n; ++j) {
                    const int fj = l.s_bit(j) ^ f0;
                    parity ^= fj;
                    mask |= static_cast<std::uint64_t>(fj) << j;
                }
                if (parity == l.b) terms.push_back(mask);
            }
        }
        m.monomials.push_back(std::move(terms));
    }
    return m;
}

inline EigenvalueModel model_for(SchemePreset preset, int n) {
    return preset == SchemePreset::ZBasis ? z_scheme_model(n) : ghz_model(n, axis_of(preset));
}

inline Eigen::MatrixXd eigenvalue_gradients(const EigenvalueModel &model, const std::vector<double> &theta) {
    return model.gradients(theta);
}

/// Central finite differences of the eigenvalues.
inline Eigen::MatrixXd finite_difference_gradients(const EigenvalueModel &model, const std::vector<double> &theta,
                                                   double step = 1e-6) {
    Eigen::MatrixXd g(static_cast<Eigen::Index>(model.labels()), model.n);
    std::vector<double> probe = theta;
    for (int a = 0; a < model.n; ++a) {
        const auto as = static_cast<std::size_t>(a);
        probe[as] = theta[as] + step;
        const Eigen::VectorXd up = model.eigenvalues(probe);
        probe[as] = theta[as] - step;
        const Eigen::VectorXd down = model.eigenvalues(probe);
        probe[as] = theta[as];
        g.col(a) = (up - down) / (2.0 * step);
    }
    return g;
}

inline constexpr double kZeroEigenvalue = 1e-300;
inline constexpr double kZeroGradient = 1e-14;

/// Eigenvalues l_jk of the symmetric logarithmic derivative L_j in the fixed basis.
inline Eigen::VectorXd sld_eigenvalues(const EigenvalueModel &model, const std::vector<double> &theta, int j) {
    if (j < 0 || j >= model.n) throw Error(ErrorCode::InvalidParameter, "parameter index out of range");
    const Eigen::VectorXd lam = model.eigenvalues(theta);
    const Eigen::VectorXd d = model.gradients(theta).col(j);
    Eigen::VectorXd l(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        if (lam(k) > kZeroEigenvalue) {
            l(k) = d(k) / lam(k);
        } else if (std::abs(d(k)) <= kZeroGradient) {
            l(k) = 0.0;
        } else {
            throw Error(ErrorCode::UnsupportedSupport, "zero eigenvalue with nonzero gradient");
        }
    }
    return l;
}

struct QfimResult {
    Eigen::MatrixXd F;
    bool invertible = false;
    Eigen::MatrixXd F_inverse;   // per-shot covariance bound when invertible
    Eigen::MatrixXd null_space;  // columns span unidentifiable directions
    Eigen::VectorXd spectrum;
    bool boundary_singular = false;  // some lambda_k = 0 with nonzero gradient

    [[nodiscard]] double condition_number() const {
        const double lo = spectrum.minCoeff();
        return lo > 0.0 ? spectrum.maxCoeff() / lo : std::numeric_limits<double>::infinity();
    }
};

inline constexpr double kSingularRelative = 1e-10;

/// F_ab = sum_k (1/lambda_k) dlambda_k/dtheta_a dlambda_k/dtheta_b, with rank-revealing inversion.
inline QfimResult qfim_from(const Eigen::VectorXd &lam, const Eigen::MatrixXd &grad) {
    const auto n = grad.cols();
    QfimResult r;
    r.F = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        const auto gk = grad.row(k);
        if (lam(k) > kZeroEigenvalue) {
            r.F += gk.transpose() * gk / lam(k);
        } else if (gk.cwiseAbs().maxCoeff() > kZeroGradient) {
            r.boundary_singular = true;
        }
    }
    r.F = 0.5 * (r.F + r.F.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.F);
    r.spectrum = es.eigenvalues();
    const double scale = r.spectrum.cwiseAbs().maxCoeff();
    const double threshold = kSingularRelative * (scale > 0.0 ? scale : 1.0);
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (r.spectrum(i) <= threshold) null_cols.push_back(i);
    }
    r.null_space.resize(n, static_cast<Eigen::Index>(null_cols.size()));
    for (std::size_t c = 0; c < null_cols.size(); ++c) {
        r.null_space.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(null_cols[c]);
    }
    r.invertible = null_cols.empty() && !r.boundary_singular;
    if (r.invertible) {
        r.F_inverse = es.eigenvectors() * r.spectrum.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    }
    return r;
}

inline QfimResult qfim(const EigenvalueModel &model, const std::vector<double> &theta) {
    return qfim_from(model.eigenvalues(theta), model.gradients(theta));
}

inline QfimResult qfim_finite_difference(const EigenvalueModel &model, const std::vector<double> &theta,
                                         double step = 1e-6) {
    return qfim_from(model.eigenvalues(theta), finite_difference_gradients(model, theta, step));
}

struct QcrbRow {
    int parameter = 0;
    double variance = 0.0;  // estimator variance at `shots`
    double bound = 0.0;     // [F^-1]_jj / shots
    double ratio = 0.0;
    bool violation = false;
};

/// Compares estimator variances with the QCRB. Ratios below 1 - 3 * mc_tolerance are flagged.
inline std::vector<QcrbRow> qcrb_check(const std::vector<double> &variances, const QfimResult &q, std::uint64_t shots,
                                       double mc_tolerance) {
    if (!q.invertible) {
        throw Error(ErrorCode::InvalidParameter, "QCRB undefined: Fisher matrix is singular");
    }
    if (static_cast<Eigen::Index>(variances.size()) != q.F.rows()) {
        throw Error(ErrorCode::InvalidParameter, "variance vector does not match Fisher matrix");
    }
    std::vector<QcrbRow> rows;
    for (std::size_t j = 0; j < variances.size(); ++j) {
        QcrbRow r;
        r.parameter = static_cast<int>(j);
        r.variance = variances[j];
        r.bound = q.F_inverse(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) / static_cast<double>(shots);
        r.ratio = r.variance / r.bound;
        r.violation = r.ratio < 1.0 - 3.0 * mc_tolerance;
        rows.push_back(r);
    }
    return rows;
}

/// Same check using the report's own standard errors.
inline std::vector<QcrbRow> qcrb_check(const EstimateReport &report, const QfimResult &q, double mc_tolerance) {
    std::vector<double> var;
    for (double se : report.std_errors) var.push_back(se * se);
    return qcrb_check(var, q, report.shots, mc_tolerance);
}

} // namespace qntomo
