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

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qntomo/channels.hpp"
#include "qntomo/error.hpp"

namespace qntomo {

using LabelIndex = std::uint64_t;

/// How outcome labels are read: computational bit strings or GHZ labels (s, b).
enum class LabelKind { Bits, Ghz };

inline constexpr int kMaxLabelQubits = 24;

/**
 * GHZ basis label on n qubits: |Phi_s^b> = (|0 s> + (-1)^b |1 s-bar>) / sqrt(2).
 *
 * Qubit 0 is the reference qubit. `s` holds the bits of qubits 1..n-1 with
 * qubit 1 as the most significant bit.
 */
struct GhzLabel {
    int qubits = 1;
    LabelIndex s = 0;
    int b = 0;

    [[nodiscard]] LabelIndex s_mask() const { return (LabelIndex{1} << (qubits - 1)) - 1; }

    /// Bit s_j for qubit j in 1..n-1.
    [[nodiscard]] int s_bit(int j) const { return static_cast<int>((s >> (qubits - 1 - j)) & 1U); }

    /// Packed index: b above the n-1 bits of s.
    [[nodiscard]] LabelIndex packed() const { return (static_cast<LabelIndex>(b) << (qubits - 1)) | s; }

    static GhzLabel unpack(int qubits, LabelIndex index) {
        GhzLabel l;
        l.qubits = qubits;
        l.s = index & ((LabelIndex{1} << (qubits - 1)) - 1);
        l.b = static_cast<int>((index >> (qubits - 1)) & 1U);
        return l;
    }

    friend bool operator==(const GhzLabel &, const GhzLabel &) = default;
};

struct PauliImage {
    GhzLabel label;
    Complex phase;
};

/**
 * Action of a single-qubit Pauli on qubit j of |Phi_s^b>.
 *
 * X flips s on qubit j (every bit of s for j = 0), Z flips b, Y = iXZ does
 * both. The phase is exact, including the sign picked up when X hits the
 * reference qubit or Z hits a qubit with s_j = 1.
 */
inline PauliImage ghz_pauli_action(const GhzLabel &label, PauliAxis axis, int j) {
    if (j < 0 || j >= label.qubits) {
        throw Error(ErrorCode::LabelMismatch, "qubit index outside GHZ label");
    }
    auto apply_x = [j](GhzLabel l) -> PauliImage {
        if (j == 0) {
            const Complex phase = l.b ? -1.0 : 1.0;
            l.s ^= l.s_mask();
            return {l, phase};
        }
        l.s ^= LabelIndex{1} << (l.qubits - 1 - j);
        return {l, 1.0};
    };
    auto apply_z = [j](GhzLabel l) -> PauliImage {
        const Complex phase = (j > 0 && l.s_bit(j)) ? -1.0 : 1.0;
        l.b ^= 1;
        return {l, phase};
    };
    switch (axis) {
        case PauliAxis::X: return apply_x(label);
        case PauliAxis::Z: return apply_z(label);
        case PauliAxis::Y: {
            const auto zed = apply_z(label);
            const auto ex = apply_x(zed.label);
            return {ex.label, Complex(0, 1) * zed.phase * ex.phase};
        }
    }
    throw Error(ErrorCode::InvalidParameter, "invalid Pauli axis");
}

/// Probability map over outcome labels, indexed by packed label.
struct DiagonalState {
    LabelKind kind = LabelKind::Bits;
    int qubits = 0;
    std::vector<double> probabilities;

    [[nodiscard]] std::size_t size() const { return probabilities.size(); }
    [[nodiscard]] double total() const { return std::accumulate(probabilities.begin(), probabilities.end(), 0.0); }
    [[nodiscard]] double operator[](LabelIndex i) const { return probabilities[static_cast<std::size_t>(i)]; }
};

inline std::size_t label_count(int qubits) {
    if (qubits < 0 || qubits > kMaxLabelQubits) {
        throw Error(ErrorCode::Capacity, "label width " + std::to_string(qubits) + " unsupported");
    }
    return std::size_t{1} << qubits;
}

inline std::string bit_string(LabelIndex value, int width) {
    std::string out(static_cast<std::size_t>(width), '0');
    for (int i = 0; i < width; ++i) {
        if ((value >> (width - 1 - i)) & 1U) {
            out[static_cast<std::size_t>(i)] = '1';
        }
    }
    return out;
}

/// Bits: "0110" with the first qubit leftmost. Ghz: "<s>/<b>", e.g. "01/1".
inline std::string format_label(LabelKind kind, int qubits, LabelIndex index) {
    if (kind == LabelKind::Bits) {
        return bit_string(index, qubits);
    }
    const auto l = GhzLabel::unpack(qubits, index);
    return bit_string(l.s, qubits - 1) + "/" + std::to_string(l.b);
}

inline LabelIndex parse_label(LabelKind kind, int qubits, const std::string &text) {
    auto parse_bits = [](const std::string &bits, int width) {
        if (static_cast<int>(bits.size()) != width) {
            throw Error(ErrorCode::LabelMismatch, "label '" + bits + "' has wrong length");
        }
        LabelIndex v = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') {
                throw Error(ErrorCode::LabelMismatch, "label '" + bits + "' is not binary");
            }
            v = (v << 1) | static_cast<LabelIndex>(c == '1');
        }
        return v;
    };
    if (kind == LabelKind::Bits) {
        return parse_bits(text, qubits);
    }
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        throw Error(ErrorCode::LabelMismatch, "GHZ label '" + text + "' lacks '/'");
    }
    GhzLabel l;
    l.qubits = qubits;
    l.s = parse_bits(text.substr(0, slash), qubits - 1);
    l.b = static_cast<int>(parse_bits(text.substr(slash + 1), 1));
    return l.packed();
}

} // namespace qntomo
