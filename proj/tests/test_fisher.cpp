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

#include <array>

#include <gtest/gtest.h>

#include "qntomo/dense_engine.hpp"
#include "qntomo/distribution.hpp"
#include "qntomo/fisher.hpp"

namespace qntomo {
namespace {

const std::vector<double> kTheta{0.8, 0.3, 0.4};

TEST(EigenvalueModel, MatchesExactDistribution) {
    for (auto preset : {SchemePreset::ZBasis, SchemePreset::GhzX, SchemePreset::GhzY, SchemePreset::GhzZ}) {
        for (int n : {3, 5}) {
            std::vector<double> theta;
            for (int j = 0; j < n; ++j) theta.push_back(0.15 + 0.7 * j / (n - 1.0));
            const auto lam = model_for(preset, n).eigenvalues(theta);
            const auto d = exact_distribution(make_flip_frame(preset, n), theta);
            ASSERT_EQ(static_cast<std::size_t>(lam.size()), d.size());
            for (std::size_t k = 0; k < d.size(); ++k) EXPECT_NEAR(lam(static_cast<Eigen::Index>(k)), d.probabilities[k], 1e-14);
            EXPECT_NEAR(lam.sum(), 1.0, 1e-12);
        }
    }
}

TEST(EigenvalueModel, ZSchemeGradientExample) {
    const auto g = z_scheme_model(3).gradients(kTheta);
    // d alpha(00) / d theta_1
    EXPECT_NEAR(g(0, 1), 0.2, 1e-14);
    // gradients of a probability vector sum to zero
    for (Eigen::Index a = 0; a < 3; ++a) EXPECT_NEAR(g.col(a).sum(), 0.0, 1e-14);
}

TEST(Qfim, GhzDiagonal) {
    for (auto axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
        const auto q = qfim(ghz_model(3, axis), kTheta);
        ASSERT_TRUE(q.invertible);
        for (Eigen::Index i = 0; i < 3; ++i) {
            const double t = kTheta[static_cast<std::size_t>(i)];
            EXPECT_NEAR(q.F(i, i), 1.0 / (t * (1 - t)), 1e-10);
            for (Eigen::Index j = 0; j < 3; ++j) {
                if (i != j) {
                    EXPECT_NEAR(q.F(i, j), 0.0, 1e-10);
                }
            }
        }
    }
    const auto q = qfim(ghz_model(3, PauliAxis::X), kTheta);
    EXPECT_NEAR(q.F(0, 0), 6.25, 1e-10);
    EXPECT_NEAR(q.F(1, 1), 4.761904761904762, 1e-10);
    EXPECT_NEAR(q.F(2, 2), 4.166666666666667, 1e-10);
    EXPECT_NEAR(q.F_inverse(0, 0), 0.16, 1e-12);
}

TEST(Qfim, AnalyticMatchesFiniteDifference) {
    const std::array<double, 3> v{0.2, 0.5, 0.8};
    for (const auto &model : {z_scheme_model(3), ghz_model(3, PauliAxis::X)}) {
        for (double a : v)
            for (double b : v)
                for (double c : v) {
                    const std::vector<double> t{a, b, c};
                    const auto f = qfim(model, t).F;
                    const auto g = qfim_finite_difference(model, t).F;
                    EXPECT_LT((f - g).cwiseAbs().maxCoeff() / std::max(1.0, f.cwiseAbs().maxCoeff()), 1e-6);
                }
    }
}

TEST(Qfim, SymmetricPositiveSemidefinite) {
    for (const auto &t : {kTheta, std::vector<double>{0.5, 0.3, 0.4}, std::vector<double>{0.95, 0.6, 0.05}}) {
        const auto q = qfim(z_scheme_model(3), t);
        EXPECT_LT((q.F - q.F.transpose()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_GT(q.spectrum.minCoeff(), -1e-10 * q.spectrum.maxCoeff());
    }
}

TEST(Qfim, ZSchemeSingularAtHalf) {
    const auto q = qfim(z_scheme_model(3), {0.5, 0.3, 0.4});
    EXPECT_FALSE(q.invertible);
    EXPECT_GE(q.null_space.cols(), 1);
    EXPECT_LT((q.F * q.null_space).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_THROW(qcrb_check(std::vector<double>{1, 1, 1}, q, 100, 0.1), Error);
    EXPECT_TRUE(qfim(z_scheme_model(3), kTheta).invertible);
}

TEST(Qfim, SingleChannel) {
    const auto q = qfim(ghz_model(1, PauliAxis::X), {0.7});
    ASSERT_EQ(q.F.rows(), 1);
    EXPECT_NEAR(q.F(0, 0), 1.0 / 0.21, 1e-12);
}

TEST(Qfim, PermutationInvariance) {
    const std::vector<double> t{0.8, 0.3, 0.6, 0.9};
    const std::vector<double> p{0.8, 0.9, 0.3, 0.6};  // end-nodes (1,2,3) -> (2,3,1)
    const auto a = qfim(z_scheme_model(4), t).F;
    const auto b = qfim(z_scheme_model(4), p).F;
    const std::array<int, 4> where{0, 2, 3, 1};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(a(i, j), b(where[static_cast<std::size_t>(i)], where[static_cast<std::size_t>(j)]), 1e-10);
}

TEST(Qfim, BoundaryIsFlagged) {
    const auto q = qfim(ghz_model(3, PauliAxis::X), {1.0, 0.3, 0.4});
    EXPECT_TRUE(q.boundary_singular);
    EXPECT_FALSE(q.invertible);
    try {
        (void)sld_eigenvalues(ghz_model(3, PauliAxis::X), {1.0, 0.3, 0.4}, 0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedSupport);
    }
}

TEST(Sld, ReconstructionSumsToZero) {
    for (const auto &model : {z_scheme_model(3), ghz_model(3, PauliAxis::Y)}) {
        const auto lam = model.eigenvalues(kTheta);
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(sld_eigenvalues(model, kTheta, j).dot(lam), 0.0, 1e-13);
    }
}

// Dense check: d rho / d theta_j = (L rho + rho L) / 2 with L diagonal in the measurement basis.
TEST(Sld, SatisfiesDefiningEquationOnDenseState) {
    const StarTopology star(3);
    for (auto preset : {SchemePreset::ZBasis, SchemePreset::GhzX}) {
        const auto pc = build_preset(star, preset);
        auto rho_at = [&](const std::vector<double> &t) {
            const auto run = distribute_dense(star.tree(), pc.circuit, pc.eta, single_pauli_network(PauliAxis::X, t));
            return in_basis(run.state, pc.basis);
        };
        const auto model = model_for(preset, 3);
        const MatrixXc rho = rho_at(kTheta);
        for (int j = 0; j < 3; ++j) {
            const double h = 1e-6;
            auto up = kTheta;
            auto down = kTheta;
            up[static_cast<std::size_t>(j)] += h;
            down[static_cast<std::size_t>(j)] -= h;
            const MatrixXc drho = (rho_at(up) - rho_at(down)) / (2 * h);
            const Eigen::VectorXd l = sld_eigenvalues(model, kTheta, j);
            const MatrixXc L = l.cast<Complex>().asDiagonal();
            EXPECT_LT((drho - 0.5 * (L * rho + rho * L)).cwiseAbs().maxCoeff(), 1e-8) << to_string(preset) << " j=" << j;
        }
    }
}

TEST(Qcrb, RatiosAndViolations) {
    const auto q = qfim(ghz_model(3, PauliAxis::X), kTheta);
    const std::uint64_t N = 1000;
    std::vector<double> exact;
    for (double t : kTheta) exact.push_back(t * (1 - t) / N);
    for (const auto &row : qcrb_check(exact, q, N, 0.05)) {
        EXPECT_NEAR(row.ratio, 1.0, 1e-10);
        EXPECT_FALSE(row.violation);
    }
    exact[1] *= 0.5;
    EXPECT_TRUE(qcrb_check(exact, q, N, 0.05)[1].violation);
}

} // namespace
} // namespace qntomo
