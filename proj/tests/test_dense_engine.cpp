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
#include <random>

#include <gtest/gtest.h>

#include "qntomo/dense_engine.hpp"
#include "qntomo/rng.hpp"

namespace qntomo {
namespace {

DensityMatrix random_state(int qubits, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    const auto d = Eigen::Index{1} << qubits;
    MatrixXc a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    MatrixXc rho = a * a.adjoint();
    return DensityMatrix(qubits, rho / rho.trace());
}

TEST(DensityMatrix, StartsInAllZeros) {
    DensityMatrix s(3);
    EXPECT_EQ(s.dim(), 8);
    EXPECT_NEAR(s.matrix()(0, 0).real(), 1.0, 0.0);
    EXPECT_NEAR(std::abs(s.trace()), 1.0, 1e-15);
}

TEST(DensityMatrix, BellPairThroughBitFlip) {
    // (|00> + |11>)/sqrt2, X channel on qubit 1 mixes in (|01> + |10>)/sqrt2
    DensityMatrix s(2);
    s.apply({GateKind::H, {0}});
    s.apply({GateKind::CNOT, {0, 1}});
    s.apply_channel(make_single_pauli(PauliAxis::X, 0.75).model(), 1);
    const auto p = born_probabilities(s, Basis::Ghz);
    // labels packed as (b << 1) | s
    EXPECT_NEAR(p[0], 0.75, 1e-14);
    EXPECT_NEAR(p[1], 0.25, 1e-14);
    EXPECT_NEAR(p[2], 0.0, 1e-14);
    EXPECT_NEAR(p[3], 0.0, 1e-14);
    EXPECT_LT(off_diagonal_mass(s, Basis::Ghz), 1e-14);
}

TEST(DensityMatrix, QubitZeroIsMostSignificant) {
    DensityMatrix s(3);
    s.apply({GateKind::X, {0}});
    EXPECT_NEAR(s.matrix()(4, 4).real(), 1.0, 1e-15);
}

TEST(DensityMatrix, ToffoliNFansOut) {
    for (int first : {0, 1}) {
        DensityMatrix s(4);
        if (first) s.apply({GateKind::X, {2}});
        const std::array<int, 4> targets{2, 0, 1, 3};
        s.apply_toffoli_n(targets);
        const Eigen::Index expect = first ? 0b1111 : 0;
        EXPECT_NEAR(s.matrix()(expect, expect).real(), 1.0, 1e-15);
    }
}

TEST(DensityMatrix, ToffoliNPermutationMatchesMatrix) {
    const auto rho = random_state(3, 5);
    auto a = rho;
    auto b = rho;
    const std::array<int, 3> targets{0, 1, 2};
    a.apply_toffoli_n(targets);
    b.apply_gate(gates::toffoli_n(3), targets);
    EXPECT_LT((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DensityMatrix, GateOnPermutedQubits) {
    // CNOT(2 -> 0) equals CNOT(0 -> 2) with the two qubits swapped
    const auto rho = random_state(3, 11);
    auto direct = rho;
    direct.apply({GateKind::CNOT, {2, 0}});
    const std::array<int, 3> swap{2, 1, 0};
    auto via = rho.permuted(swap);
    via.apply({GateKind::CNOT, {0, 2}});
    via = via.permuted(swap);
    EXPECT_LT((direct.matrix() - via.matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DensityMatrix, ChannelPreservesTraceAndPositivity) {
    auto rho = random_state(3, 21);
    rho.apply_channel(make_depolarizing({0.4, 0.3, 0.2, 0.1}), 1);
    rho.apply_channel(make_single_pauli(PauliAxis::Y, 0.1).model(), 2);
    EXPECT_NEAR(std::abs(rho.trace() - Complex(1, 0)), 0.0, 1e-13);
    EXPECT_LT(rho.hermiticity_error(), 1e-13);
    EXPECT_GT(rho.min_eigenvalue(), -1e-12);
}

TEST(DensityMatrix, RejectsBadInput) {
    EXPECT_THROW(DensityMatrix(kMaxDenseQubits + 1), Error);
    DensityMatrix s(2);
    EXPECT_THROW(s.apply({GateKind::H, {2}}), Error);
    EXPECT_THROW(s.apply({GateKind::CNOT, {1, 1}}), Error);
    EXPECT_THROW(s.apply({GateKind::CNOT, {0}}), Error);
    MatrixXc not_unitary = MatrixXc::Identity(2, 2) * 2.0;
    const std::array<int, 1> t{0};
    EXPECT_THROW(s.apply_gate(not_unitary, t), Error);
}

TEST(GhzBasis, ProjectorsAreComplete) {
    for (int n = 1; n <= 4; ++n) {
        const auto d = Eigen::Index{1} << n;
        MatrixXc sum = MatrixXc::Zero(d, d);
        for (LabelIndex i = 0; i < label_count(n); ++i) {
            const auto p = ghz_projector(GhzLabel::unpack(n, i));
            EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-14);
            sum += p;
        }
        EXPECT_LT((sum - MatrixXc::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(GhzBasis, ExactPauliActionMatchesDense) {
    for (int n = 1; n <= 4; ++n) {
        for (LabelIndex i = 0; i < label_count(n); ++i) {
            const auto label = GhzLabel::unpack(n, i);
            for (auto axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
                for (int j = 0; j < n; ++j) {
                    const auto img = ghz_pauli_action(label, axis, j);
                    const VectorXc lhs = apply_to_vector(ghz_vector(label), pauli::of(axis), n, j);
                    const VectorXc rhs = img.phase * ghz_vector(img.label);
                    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12)
                        << "n=" << n << " label=" << i << " axis=" << to_string(axis) << " j=" << j;
                }
            }
        }
    }
}

TEST(GhzBasis, ReferenceBitFlipCarriesSign) {
    const GhzLabel l{3, 0b01, 1};
    const auto img = ghz_pauli_action(l, PauliAxis::X, 0);
    EXPECT_EQ(img.label.s, 0b10u);
    EXPECT_EQ(img.label.b, 1);
    EXPECT_NEAR(img.phase.real(), -1.0, 1e-15);
}

TEST(Diagonalize, RejectsCoherentStates) {
    DensityMatrix s(1);
    s.apply({GateKind::H, {0}});
    EXPECT_THROW(diagonalize_in_basis(s, Basis::Z), Error);
    const auto d = diagonalize_in_basis(s, Basis::Ghz);  // n = 1: GHZ basis is |+>, |->
    EXPECT_NEAR(d[0], 1.0, 1e-14);
}

} // namespace
} // namespace qntomo
