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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qntomo/dense_engine.hpp"
#include "qntomo/distribution.hpp"
#include "qntomo/error.hpp"
#include "qntomo/labels.hpp"
#include "qntomo/rng.hpp"

namespace qntomo {

/// Histogram of measured labels. Counts are indexed by packed label.
struct OutcomeRecord {
    std::string scheme;
    int n = 0;  // channels in the star
    LabelKind kind = LabelKind::Bits;
    int qubits = 0;  // label width
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> counts;

    [[nodiscard]] std::vector<double> frequencies() const {
        std::vector<double> f(counts.size(), 0.0);
        if (shots == 0) return f;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            f[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
        }
        return f;
    }

    /// Histogram addition; records must describe the same experiment.
    OutcomeRecord &operator+=(const OutcomeRecord &other) {
        if (other.kind != kind || other.qubits != qubits || other.counts.size() != counts.size()) {
            throw Error(ErrorCode::LabelMismatch, "cannot merge records with different label spaces");
        }
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
        shots += other.shots;
        return *this;
    }
};

/// Multinomial draw of `shots` labels via sequential conditional binomials.
template <class Generator>
std::vector<std::uint64_t> multinomial(const std::vector<double> &p, std::uint64_t shots, Generator &rng) {
    std::vector<std::uint64_t> counts(p.size(), 0);
    std::size_t last = p.size();
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] > 0.0) last = k;
    }
    if (last == p.size()) {
        throw Error(ErrorCode::InvalidParameter, "distribution has no mass");
    }
    double mass = 0.0;
    for (double v : p) mass += std::max(0.0, v);
    std::uint64_t remaining = shots;
    for (std::size_t k = 0; k < last && remaining > 0; ++k) {
        const double pk = std::max(0.0, p[k]);
        if (pk == 0.0) continue;
        const double q = std::clamp(pk / mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> draw(remaining, q);
        const auto c = draw(rng);
        counts[k] = c;
        remaining -= c;
        mass -= pk;
    }
    counts[last] += remaining;
    return counts;
}

/// N iid draws from a diagonal state; deterministic in (dist, shots, seed).
inline OutcomeRecord sample(const DiagonalState &dist, std::uint64_t shots, std::uint64_t seed, std::string scheme = {},
                            int n = 0) {
    if (shots < 1) {
        throw Error(ErrorCode::InvalidParameter, "shot count must be at least 1");
    }
    if (std::abs(dist.total() - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidParameter, "distribution is not normalized");
    }
    Rng rng(seed);
    OutcomeRecord r;
    r.scheme = std::move(scheme);
    r.n = n;
    r.kind = dist.kind;
    r.qubits = dist.qubits;
    r.shots = shots;
    r.seed = seed;
    r.counts = multinomial(dist.probabilities, shots, rng);
    return r;
}

/// Born-rule sampling of a dense state in the Z or GHZ basis.
inline OutcomeRecord measure_dense(const DensityMatrix &state, Basis basis, std::uint64_t shots, std::uint64_t seed) {
    auto probs = born_probabilities(state, basis);
    const double total = probs.total();
    for (auto &p : probs.probabilities) p /= total;
    return sample(probs, shots, seed);
}

/// Single-end-node flip rates p_j and pairwise rates p_jk of a Z-basis record.
class Marginals {
  public:
    Marginals(int n, std::uint64_t shots) : n_(n), shots_(shots), p_(static_cast<std::size_t>(n - 1), 0.0),
                                             pair_(Eigen::MatrixXd::Zero(n - 1, n - 1)) {}

    /// Computes marginals from label probabilities over n-1 bits (end-node 1 leftmost).
    static Marginals from_distribution(int n, const std::vector<double> &prob, std::uint64_t shots = 0) {
        const int w = n - 1;
        if (n < 2 || prob.size() != label_count(w)) {
            throw Error(ErrorCode::LabelMismatch, "distribution does not match star size");
        }
        Marginals m(n, shots);
        for (std::size_t label = 0; label < prob.size(); ++label) {
            const double p = prob[label];
            if (p == 0.0) continue;
            for (int j = 1; j < n; ++j) {
                if (!((label >> (w - j)) & 1U)) continue;
                m.p_[static_cast<std::size_t>(j - 1)] += p;
                for (int k = j + 1; k < n; ++k) {
                    if ((label >> (w - k)) & 1U) m.pair_(j - 1, k - 1) += p;
                }
            }
        }
        for (int j = 0; j < w; ++j) {
            for (int k = j + 1; k < w; ++k) m.pair_(k, j) = m.pair_(j, k);
        }
        return m;
    }

    /// Direct construction from flip rates; `pairs(j-1, k-1)` holds p_jk.
    static Marginals from_values(std::vector<double> p, const Eigen::MatrixXd &pairs, std::uint64_t shots = 0) {
        const int n = static_cast<int>(p.size()) + 1;
        Marginals m(n, shots);
        m.p_ = std::move(p);
        m.pair_ = pairs;
        return m;
    }

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] std::uint64_t shots() const noexcept { return shots_; }
    /// Pr[S_j = 1], j in 1..n-1.
    [[nodiscard]] double p(int j) const { return p_.at(static_cast<std::size_t>(j - 1)); }
    /// Pr[S_j = 1, S_k = 1], j != k in 1..n-1.
    [[nodiscard]] double pair(int j, int k) const { return pair_(j - 1, k - 1); }

  private:
    int n_;
    std::uint64_t shots_;
    std::vector<double> p_;
    Eigen::MatrixXd pair_;
};

inline Marginals marginals(const OutcomeRecord &record) {
    if (record.kind != LabelKind::Bits) {
        throw Error(ErrorCode::WrongScheme, "marginals require a Z-basis record");
    }
    if (record.qubits != record.n - 1) {
        throw Error(ErrorCode::LabelMismatch, "record width does not match star size");
    }
    return Marginals::from_distribution(record.n, record.frequencies(), record.shots);
}

// ---------------------------------------------------------------------------
// CSV: two comment lines, then "label,count" with every label listed.

inline constexpr const char *kRecordFormat = "qntomo-record v1";

inline void write_record_csv(std::ostream &os, const OutcomeRecord &r) {
    os << "# " << kRecordFormat << "\n";
    os << "# scheme=" << r.scheme << " n=" << r.n << " kind=" << (r.kind == LabelKind::Bits ? "bits" : "ghz")
       << " qubits=" << r.qubits << " shots=" << r.shots << " seed=" << r.seed << "\n";
    os << "label,count\n";
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
        os << format_label(r.kind, r.qubits, i) << "," << r.counts[i] << "\n";
    }
}

inline OutcomeRecord read_record_csv(std::istream &is) {
    std::string line;
    auto fail = [](const std::string &msg) { return Error(ErrorCode::Io, "record: " + msg); };
    if (!std::getline(is, line) || line != std::string("# ") + kRecordFormat) {
        throw fail("missing format header");
    }
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
        throw fail("missing metadata line");
    }
    OutcomeRecord r;
    std::istringstream meta(line.substr(2));
    std::string field;
    std::string kind;
    int qubits = -1;
    while (meta >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw fail("bad metadata field '" + field + "'");
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "scheme") r.scheme = value;
        else if (key == "n") r.n = std::stoi(value);
        else if (key == "kind") kind = value;
        else if (key == "qubits") qubits = std::stoi(value);
        else if (key == "shots") r.shots = std::stoull(value);
        else if (key == "seed") r.seed = std::stoull(value);
    }
    if (kind != "bits" && kind != "ghz") throw fail("unknown label kind '" + kind + "'");
    r.kind = kind == "bits" ? LabelKind::Bits : LabelKind::Ghz;
    r.qubits = qubits >= 0 ? qubits : (r.kind == LabelKind::Bits ? r.n - 1 : r.n);
    if (r.qubits < 1 || r.qubits > kMaxLabelQubits) throw fail("bad label width");
    r.counts.assign(label_count(r.qubits), 0);
    if (!std::getline(is, line) || line != "label,count") throw fail("missing column header");
    std::uint64_t total = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw fail("bad row '" + line + "'");
        const auto idx = parse_label(r.kind, r.qubits, line.substr(0, comma));
        const auto c = std::stoull(line.substr(comma + 1));
        r.counts[static_cast<std::size_t>(idx)] = c;
        total += c;
    }
    if (total != r.shots) throw fail("counts sum to " + std::to_string(total) + ", header says " +
                                     std::to_string(r.shots));
    return r;
}

} // namespace qntomo
