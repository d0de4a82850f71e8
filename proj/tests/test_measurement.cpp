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

#include <sstream>

#include <gtest/gtest.h>

#include "qntomo/distribution.hpp"
#include "qntomo/measurement.hpp"

namespace qntomo {
namespace {

const std::vector<double> kTheta{0.8, 0.3, 0.4};

DiagonalState z_dist() { return exact_distribution(make_flip_frame(SchemePreset::ZBasis, 3), kTheta); }

TEST(Sample, PointMass) {
    DiagonalState d{LabelKind::Bits, 2, {0, 0, 1, 0}};
    const auto r = sample(d, 1000, 3);
    EXPECT_EQ(r.counts, (std::vector<std::uint64_t>{0, 0, 1000, 0}));
}

TEST(Sample, Deterministic) {
    const auto a = sample(z_dist(), 5000, 42, "Z_BASIS_X_CHANNELS", 3);
    const auto b = sample(z_dist(), 5000, 42, "Z_BASIS_X_CHANNELS", 3);
    const auto c = sample(z_dist(), 5000, 43, "Z_BASIS_X_CHANNELS", 3);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_NE(a.counts, c.counts);
}

TEST(Sample, MarginalsConverge) {
    const std::uint64_t N = 1000000;
    const auto r = sample(z_dist(), N, 7, "Z_BASIS_X_CHANNELS", 3);
    const auto m = marginals(r);
    auto tol = [&](double p) { return 5.0 * std::sqrt(p * (1 - p) / N); };
    EXPECT_NEAR(m.p(1), 0.62, tol(0.62));
    EXPECT_NEAR(m.p(2), 0.56, tol(0.56));
    EXPECT_NEAR(m.pair(1, 2), 0.36, tol(0.36));

    const auto g = sample(exact_distribution(make_flip_frame(SchemePreset::GhzX, 3), kTheta), N, 7, "GHZ_X", 3);
    double b1 = 0.0;
    for (LabelIndex i = 0; i < g.counts.size(); ++i) {
        if (GhzLabel::unpack(3, i).b) b1 += static_cast<double>(g.counts[i]) / N;
    }
    EXPECT_NEAR(b1, 0.2, tol(0.2));
}

TEST(Sample, RejectsBadInput) {
    EXPECT_THROW(sample(z_dist(), 0, 1), Error);
    DiagonalState d{LabelKind::Bits, 1, {0.3, 0.3}};
    EXPECT_THROW(sample(d, 10, 1), Error);
}

TEST(Sample, MergeIsHistogramAddition) {
    auto a = sample(z_dist(), 300, 1, "Z_BASIS_X_CHANNELS", 3);
    const auto b = sample(z_dist(), 700, 2, "Z_BASIS_X_CHANNELS", 3);
    auto sum = a.counts;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += b.counts[i];
    a += b;
    EXPECT_EQ(a.counts, sum);
    EXPECT_EQ(a.shots, 1000u);
    auto g = sample(exact_distribution(make_flip_frame(SchemePreset::GhzX, 3), kTheta), 10, 1);
    EXPECT_THROW(a += g, Error);
}

TEST(Marginals, ExactValues) {
    const auto m = Marginals::from_distribution(3, z_dist().probabilities);
    EXPECT_NEAR(m.p(1), 0.62, 1e-14);
    EXPECT_NEAR(m.p(2), 0.56, 1e-14);
    EXPECT_NEAR(m.pair(1, 2), 0.36, 1e-14);
    EXPECT_NEAR(m.pair(2, 1), 0.36, 1e-14);
}

TEST(Marginals, AllZeroOutcomes) {
    DiagonalState d{LabelKind::Bits, 3, std::vector<double>(8, 0.0)};
    d.probabilities[0] = 1.0;
    const auto m = marginals(sample(d, 100, 1, "", 4));
    for (int j = 1; j < 4; ++j) {
        EXPECT_EQ(m.p(j), 0.0);
        for (int k = j + 1; k < 4; ++k) EXPECT_EQ(m.pair(j, k), 0.0);
    }
}

TEST(Marginals, GhzRecordRejected) {
    const auto g = sample(exact_distribution(make_flip_frame(SchemePreset::GhzX, 3), kTheta), 10, 1, "GHZ_X", 3);
    try {
        (void)marginals(g);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::WrongScheme);
    }
}

TEST(MeasureDense, GhzProjectorAndMaximallyMixed) {
    const auto r = measure_dense(ghz_state({3, 0, 0}), Basis::Ghz, 500, 1);
    EXPECT_EQ(r.counts[0], 500u);
    DensityMatrix mixed(3, MatrixXc::Identity(8, 8) / 8.0);
    const auto u = measure_dense(mixed, Basis::Z, 80000, 2);
    for (auto c : u.counts) EXPECT_NEAR(c / 80000.0, 0.125, 5 * std::sqrt(0.125 * 0.875 / 80000));
}

TEST(MeasureDense, AgreesWithFlipEngine) {
    const StarTopology star(3);
    const auto pc = build_preset(star, SchemePreset::GhzX);
    const auto run = distribute_dense(star.tree(), pc.circuit, pc.eta, single_pauli_network(PauliAxis::X, kTheta));
    const std::uint64_t N = 100000;
    const auto r = measure_dense(run.state, Basis::Ghz, N, 5);
    const auto exact = exact_distribution(make_flip_frame(SchemePreset::GhzX, 3), kTheta);
    for (std::size_t k = 0; k < r.counts.size(); ++k) {
        const double p = exact.probabilities[k];
        EXPECT_NEAR(static_cast<double>(r.counts[k]) / N, p, 4 * std::sqrt(p * (1 - p) / N) + 1e-12);
    }
}

TEST(RecordCsv, RoundTrip) {
    for (auto preset : {SchemePreset::ZBasis, SchemePreset::GhzY}) {
        const auto d = exact_distribution(make_flip_frame(preset, 3), kTheta);
        const auto r = sample(d, 1234, 77, std::string(to_string(preset)), 3);
        std::stringstream ss;
        write_record_csv(ss, r);
        const auto back = read_record_csv(ss);
        EXPECT_EQ(back.scheme, r.scheme);
        EXPECT_EQ(back.n, 3);
        EXPECT_EQ(back.kind, r.kind);
        EXPECT_EQ(back.qubits, r.qubits);
        EXPECT_EQ(back.shots, 1234u);
        EXPECT_EQ(back.seed, 77u);
        EXPECT_EQ(back.counts, r.counts);
    }
}

TEST(RecordCsv, RejectsCorruptFiles) {
    std::stringstream bad("# qntomo-record v1\n# scheme=GHZ_X n=2 kind=ghz shots=5 seed=1\nlabel,count\n0/0,3\n");
    EXPECT_THROW(read_record_csv(bad), Error);
    std::stringstream wrong("hello\n");
    EXPECT_THROW(read_record_csv(wrong), Error);
    std::stringstream label("# qntomo-record v1\n# scheme=GHZ_X n=2 kind=ghz shots=3 seed=1\nlabel,count\n00/0,3\n");
    EXPECT_THROW(read_record_csv(label), Error);
}

TEST(Labels, FormatAndParse) {
    EXPECT_EQ(format_label(LabelKind::Bits, 3, 0b011), "011");
    EXPECT_EQ(format_label(LabelKind::Ghz, 3, GhzLabel{3, 0b01, 1}.packed()), "01/1");
    EXPECT_EQ(parse_label(LabelKind::Ghz, 3, "10/0"), (GhzLabel{3, 0b10, 0}.packed()));
    EXPECT_THROW(parse_label(LabelKind::Bits, 3, "0120"), Error);
}

} // namespace
} // namespace qntomo
