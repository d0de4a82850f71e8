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
#include <string>
#include <string_view>
#include <vector>

#include "qntomo/channels.hpp"
#include "qntomo/error.hpp"

namespace qntomo {

/// Gate vocabulary for node circuits. Composite names read as matrix products:
/// HZ applies Z first, then H.
enum class GateKind { H, X, Y, Z, XHX, HZ, CNOT, ToffoliN };

constexpr std::string_view to_string(GateKind kind) {
    switch (kind) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::XHX: return "XHX";
        case GateKind::HZ: return "HZ";
        case GateKind::CNOT: return "CNOT";
        case GateKind::ToffoliN: return "TOFFOLI_N";
    }
    return "?";
}

inline GateKind parse_gate(std::string_view name) {
    for (GateKind k : {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::XHX, GateKind::HZ, GateKind::CNOT,
                       GateKind::ToffoliN}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw Error(ErrorCode::InvalidGate, "unknown gate '" + std::string(name) + "'");
}

/// A gate acting on register slots of one node. For CNOT and TOFFOLI_N the
/// first slot is the control.
struct Gate {
    GateKind kind;
    std::vector<int> slots;

    friend bool operator==(const Gate &, const Gate &) = default;
};

namespace gates {

inline Matrix2c hadamard() {
    Matrix2c m;
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, r, -r;
    return m;
}

inline Matrix2c single_qubit(GateKind kind) {
    switch (kind) {
        case GateKind::H: return hadamard();
        case GateKind::X: return pauli::x();
        case GateKind::Y: return pauli::y();
        case GateKind::Z: return pauli::z();
        case GateKind::XHX: return pauli::x() * hadamard() * pauli::x();
        case GateKind::HZ: return hadamard() * pauli::z();
        default: break;
    }
    throw Error(ErrorCode::InvalidGate, std::string(to_string(kind)) + " is not a single-qubit gate");
}

inline bool is_single_qubit(GateKind kind) { return kind != GateKind::CNOT && kind != GateKind::ToffoliN; }

/// T_k = |0><0| (x) I + |1><1| (x) X^(k-1), dense form (control is the most significant qubit).
inline MatrixXc toffoli_n(int k) {
    const auto dim = Eigen::Index{1} << k;
    MatrixXc m = MatrixXc::Zero(dim, dim);
    const auto half = dim / 2;
    for (Eigen::Index i = 0; i < half; ++i) {
        m(i, i) = 1.0;
        m(half + i, half + (half - 1 - i)) = 1.0;
    }
    return m;
}

} // namespace gates

inline void check_gate_arity(const Gate &g) {
    const auto n = g.slots.size();
    const bool ok = gates::is_single_qubit(g.kind) ? n == 1 : (g.kind == GateKind::CNOT ? n == 2 : n >= 1);
    if (!ok) {
        throw Error(ErrorCode::InvalidGate,
                    std::string(to_string(g.kind)) + " applied to " + std::to_string(n) + " slots");
    }
}

} // namespace qntomo
