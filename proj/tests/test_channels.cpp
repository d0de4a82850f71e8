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

#include <random>

#include <gtest/gtest.h>

#include "qntomo/channels.hpp"
#include "qntomo/dense_engine.hpp"
#include "qntomo/rng.hpp"

namespace qntomo {
namespace {

Matrix2c random_state(std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    Matrix2c a;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = Complex(g(rng), g(rng));
    Matrix2c rho = a * a.adjoint();
    return rho / rho.trace();
}

TEST(Channels, KrausCompleteness) {
    for (double t : {0.0, 0.3, 1.0}) {
        for (auto axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
            Matrix2c sum = Matrix2c::Zero();
            for (const auto &k : kraus_operators(make_single_pauli(axis, t).model())) sum += k.adjoint() * k;
            EXPECT_LT((sum - Matrix2c::Identity()).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
    Matrix2c sum = Matrix2c::Zero();
    for (const auto &k : make_depolarizing({0.4, 0.3, 0.2, 0.1}).kraus_operators()) sum += k.adjoint() * k;
    EXPECT_LT((sum - Matrix2c::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Channels, ApplyMatchesKrausSum) {
    const auto ch = make_depolarizing({0.55, 0.2, 0.15, 0.1});
    const auto rho = random_state(4);
    Matrix2c k = Matrix2c::Zero();
    for (const auto &op : ch.kraus_operators()) k += op * rho * op.adjoint();
    EXPECT_LT((ch.apply(rho) - k).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(std::abs(ch.apply(rho).trace()), 1.0, 1e-14);
}

TEST(Channels, SinglePauliAction) {
    const auto rho = random_state(9);
    const auto out = make_single_pauli(PauliAxis::Y, 0.7).model().apply(rho);
    const Matrix2c expected = 0.7 * rho + 0.3 * pauli::y() * rho * pauli::y();
    EXPECT_LT((out - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Channels, SameAxisComposition) {
    const auto a = make_single_pauli(PauliAxis::X, 0.8);
    const auto b = make_single_pauli(PauliAxis::X, 0.35);
    const auto c = compose(a, b);
    EXPECT_NEAR(c.theta, 0.8 * 0.35 + 0.2 * 0.65, 1e-15);
    const auto rho = random_state(2);
    const auto lhs = b.model().apply(a.model().apply(rho));
    EXPECT_LT((lhs - c.model().apply(rho)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Channels, AxisDetectionUpToPhase) {
    EXPECT_EQ(make_single_pauli(PauliAxis::Z, 0.4).model().single_pauli_axis(), PauliAxis::Z);
    const ChannelModel phased({pauli::identity(), Complex(0, 1) * pauli::x()}, {0.6, 0.4});
    EXPECT_EQ(phased.single_pauli_axis(), PauliAxis::X);
    EXPECT_FALSE(make_depolarizing({0.7, 0.1, 0.1, 0.1}).single_pauli_axis().has_value());
    EXPECT_NEAR(make_depolarizing({0.7, 0.1, 0.1, 0.1}).identity_weight(), 0.7, 1e-15);
}

TEST(Channels, RejectsInvalidParameters) {
    EXPECT_THROW(make_single_pauli(PauliAxis::X, 1.5), Error);
    EXPECT_THROW(make_single_pauli(PauliAxis::X, -0.1), Error);
    EXPECT_THROW(make_depolarizing({0.5, 0.5, 0.5, 0.5}), Error);
    EXPECT_THROW(make_depolarizing({0.5, 0.5}), Error);
    EXPECT_THROW(ChannelModel({2.0 * pauli::x()}, {1.0}), Error);
    EXPECT_THROW(parse_axis("W"), Error);
}

TEST(Channels, FlipSamplingFrequency) {
    Rng rng(17);
    const SinglePauliChannel ch{PauliAxis::X, 0.3};
    int flips = 0;
    const int trials = 200000;
    for (int i = 0; i < trials; ++i) flips += sample_flip(ch, rng) ? 1 : 0;
    EXPECT_NEAR(static_cast<double>(flips) / trials, 0.7, 5 * std::sqrt(0.21 / trials));
}

} // namespace
} // namespace qntomo
