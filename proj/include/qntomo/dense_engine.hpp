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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qntomo/channels.hpp"
#include "qntomo/error.hpp"
#include "qntomo/gates.hpp"
#include "qntomo/labels.hpp"

namespace qntomo {

using VectorXc = Eigen::VectorXcd;

inline constexpr int kMaxDenseQubits = 12;
inline constexpr double kDiagonalTolerance = 1e-10;
inline constexpr double kUnitaryTolerance = 1e-10;

enum class Basis { Z, Ghz };

namespace detail {

inline void check_capacity(int qubits) {
    if (qubits < 1 || qubits > kMaxDenseQubits) {
        throw Error(ErrorCode::Capacity, "dense engine supports 1.." + std::to_string(kMaxDenseQubits) +
                                             " qubits, requested " + std::to_string(qubits));
    }
}

// Index offsets of the 2^k sub-basis spanned by `targets`; targets[0] is the
// most significant bit of the gate's own index.
inline std::vector<Eigen::Index> target_offsets(int qubits, std::span<const int> targets, Eigen::Index &mask) {
    const auto k = static_cast<int>(targets.size());
    std::vector<Eigen::Index> offsets(std::size_t{1} << k, 0);
    mask = 0;
    for (int t = 0; t < k; ++t) {
        mask |= Eigen::Index{1} << (qubits - 1 - targets[static_cast<std::size_t>(t)]);
    }
    for (std::size_t m = 0; m < offsets.size(); ++m) {
        Eigen::Index off = 0;
        for (int t = 0; t < k; ++t) {
            if ((m >> (k - 1 - t)) & 1U) {
                off |= Eigen::Index{1} << (qubits - 1 - targets[static_cast<std::size_t>(t)]);
            }
        }
        offsets[m] = off;
    }
    return offsets;
}

// m <- (U on targets) * m
inline void apply_left(MatrixXc &m, const MatrixXc &u, int qubits, std::span<const int> targets) {
    Eigen::Index mask = 0;
    const auto offsets = target_offsets(qubits, targets, mask);
    const auto sub = static_cast<Eigen::Index>(offsets.size());
    const Eigen::Index dim = m.rows();
    VectorXc in(sub);
    VectorXc out(sub);
    for (Eigen::Index base = 0; base < dim; ++base) {
        if (base & mask) continue;
        for (Eigen::Index col = 0; col < m.cols(); ++col) {
            for (Eigen::Index i = 0; i < sub; ++i) in(i) = m(base + offsets[static_cast<std::size_t>(i)], col);
            out.noalias() = u * in;
            for (Eigen::Index i = 0; i < sub; ++i) m(base + offsets[static_cast<std::size_t>(i)], col) = out(i);
        }
    }
}

inline int bit_of(Eigen::Index index, int qubits, int q) {
    return static_cast<int>((index >> (qubits - 1 - q)) & 1);
}

} // namespace detail

/**
 * Dense 2^K x 2^K density matrix; qubit 0 is the most significant tensor factor.
 */
class DensityMatrix {
  public:
    /// |0...0><0...0| on `qubits` qubits.
    explicit DensityMatrix(int qubits) : qubits_(qubits) {
        detail::check_capacity(qubits);
        rho_ = MatrixXc::Zero(dim(), dim());
        rho_(0, 0) = 1.0;
    }

    DensityMatrix(int qubits, MatrixXc rho) : qubits_(qubits), rho_(std::move(rho)) {
        detail::check_capacity(qubits);
        if (rho_.rows() != dim() || rho_.cols() != dim()) {
            throw Error(ErrorCode::InvalidParameter, "density matrix dimension does not match qubit count");
        }
    }

    static DensityMatrix from_pure(int qubits, const VectorXc &psi) {
        return DensityMatrix(qubits, psi * psi.adjoint());
    }

    [[nodiscard]] int qubits() const noexcept { return qubits_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return Eigen::Index{1} << qubits_; }
    [[nodiscard]] const MatrixXc &matrix() const noexcept { return rho_; }
    [[nodiscard]] Complex trace() const { return rho_.trace(); }

    [[nodiscard]] double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

    [[nodiscard]] double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    /// rho <- U rho U^dagger with U acting on `targets` (targets[0] most significant in U).
    void apply_gate(const MatrixXc &u, std::span<const int> targets) {
        check_targets(targets);
        const auto sub = Eigen::Index{1} << targets.size();
        if (u.rows() != sub || u.cols() != sub) {
            throw Error(ErrorCode::InvalidGate, "gate dimension does not match target count");
        }
        if ((u.adjoint() * u - MatrixXc::Identity(sub, sub)).cwiseAbs().maxCoeff() > kUnitaryTolerance) {
            throw Error(ErrorCode::InvalidGate, "gate is not unitary");
        }
        conjugate(u, targets);
    }

    void apply_gate(const Matrix2c &u, int target) {
        const int t[] = {target};
        apply_gate(MatrixXc(u), t);
    }

    /// Controlled-X fan-out T_k: control = targets[0], X on all remaining targets.
    void apply_toffoli_n(std::span<const int> targets) {
        check_targets(targets);
        if (targets.size() < 2) {
            return;  // T_1 is the identity
        }
        const auto control = Eigen::Index{1} << (qubits_ - 1 - targets[0]);
        Eigen::Index flip = 0;
        for (std::size_t t = 1; t < targets.size(); ++t) {
            flip |= Eigen::Index{1} << (qubits_ - 1 - targets[t]);
        }
        auto perm = [&](Eigen::Index i) { return (i & control) ? (i ^ flip) : i; };
        MatrixXc out(dim(), dim());
        for (Eigen::Index c = 0; c < dim(); ++c) {
            for (Eigen::Index r = 0; r < dim(); ++r) {
                out(perm(r), perm(c)) = rho_(r, c);
            }
        }
        rho_ = std::move(out);
    }

    /// Applies a named gate; slots are global qubit indices here.
    void apply(const Gate &g) {
        check_gate_arity(g);
        switch (g.kind) {
            case GateKind::CNOT:
            case GateKind::ToffoliN:
                apply_toffoli_n(g.slots);
                return;
            default:
                apply_gate(gates::single_qubit(g.kind), g.slots[0]);
                return;
        }
    }

    /// rho <- sum_k theta_k U_k rho U_k^dagger on `target`.
    void apply_channel(const ChannelModel &channel, int target) {
        const int t[] = {target};
        check_targets(t);
        MatrixXc acc = MatrixXc::Zero(dim(), dim());
        for (std::size_t k = 0; k < channel.size(); ++k) {
            const double w = channel.theta()[k];
            if (w == 0.0) continue;
            DensityMatrix copy(*this);
            copy.conjugate(MatrixXc(channel.unitaries()[k]), t);
            acc += w * copy.rho_;
        }
        rho_ = std::move(acc);
    }

    /// Reorders tensor factors: new qubit i is old qubit order[i].
    [[nodiscard]] DensityMatrix permuted(std::span<const int> order) const {
        if (static_cast<int>(order.size()) != qubits_) {
            throw Error(ErrorCode::InvalidParameter, "permutation size mismatch");
        }
        check_targets(order);
        auto map = [&](Eigen::Index old_index) {
            Eigen::Index idx = 0;
            for (int i = 0; i < qubits_; ++i) {
                idx = (idx << 1) | detail::bit_of(old_index, qubits_, order[static_cast<std::size_t>(i)]);
            }
            return idx;
        };
        MatrixXc out(dim(), dim());
        for (Eigen::Index c = 0; c < dim(); ++c) {
            const auto mc = map(c);
            for (Eigen::Index r = 0; r < dim(); ++r) {
                out(map(r), mc) = rho_(r, c);
            }
        }
        return DensityMatrix(qubits_, std::move(out));
    }

  private:
    void check_targets(std::span<const int> targets) const {
        if (targets.empty()) {
            throw Error(ErrorCode::InvalidGate, "gate without targets");
        }
        std::vector<int> seen;
        for (int t : targets) {
            if (t < 0 || t >= qubits_) {
                throw Error(ErrorCode::InvalidGate, "target qubit " + std::to_string(t) + " out of range");
            }
            if (std::find(seen.begin(), seen.end(), t) != seen.end()) {
                throw Error(ErrorCode::InvalidGate, "repeated target qubit " + std::to_string(t));
            }
            seen.push_back(t);
        }
    }

    void conjugate(const MatrixXc &u, std::span<const int> targets) {
        detail::apply_left(rho_, u, qubits_, targets);
        rho_ = rho_.adjoint().eval();
        detail::apply_left(rho_, u, qubits_, targets);
        rho_ = rho_.adjoint().eval();
    }

    int qubits_;
    MatrixXc rho_;
};

/// Applies a single-qubit operator to qubit j of a state vector.
inline VectorXc apply_to_vector(const VectorXc &psi, const Matrix2c &op, int qubits, int j) {
    MatrixXc m = psi;
    const int t[] = {j};
    detail::apply_left(m, MatrixXc(op), qubits, t);
    return m.col(0);
}

inline VectorXc ghz_vector(const GhzLabel &label) {
    detail::check_capacity(label.qubits);
    const auto dim = Eigen::Index{1} << label.qubits;
    VectorXc v = VectorXc::Zero(dim);
    const double r = 1.0 / std::sqrt(2.0);
    const auto i0 = static_cast<Eigen::Index>(label.s);
    const auto i1 = static_cast<Eigen::Index>((LabelIndex{1} << (label.qubits - 1)) | (~label.s & label.s_mask()));
    v(i0) += r;
    v(i1) += label.b ? -r : r;
    return v;
}

inline MatrixXc ghz_projector(const GhzLabel &label) {
    const VectorXc v = ghz_vector(label);
    return v * v.adjoint();
}

inline DensityMatrix ghz_state(const GhzLabel &label) { return DensityMatrix::from_pure(label.qubits, ghz_vector(label)); }

/// State in the chosen basis: rho expressed as B^dagger rho B.
inline MatrixXc in_basis(const DensityMatrix &state, Basis basis) {
    if (basis == Basis::Z) {
        return state.matrix();
    }
    const int n = state.qubits();
    const auto dim = state.dim();
    MatrixXc b = MatrixXc::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        b.col(k) = ghz_vector(GhzLabel::unpack(n, static_cast<LabelIndex>(k)));
    }
    return b.adjoint() * state.matrix() * b;
}

/// Born probabilities Tr[Pi_l rho] over labels of the basis.
inline DiagonalState born_probabilities(const DensityMatrix &state, Basis basis) {
    const MatrixXc m = in_basis(state, basis);
    DiagonalState out;
    out.kind = basis == Basis::Z ? LabelKind::Bits : LabelKind::Ghz;
    out.qubits = state.qubits();
    out.probabilities.resize(static_cast<std::size_t>(state.dim()));
    for (Eigen::Index k = 0; k < state.dim(); ++k) {
        out.probabilities[static_cast<std::size_t>(k)] = std::max(0.0, m(k, k).real());
    }
    return out;
}

/// Largest off-diagonal magnitude in the basis.
inline double off_diagonal_mass(const DensityMatrix &state, Basis basis) {
    MatrixXc m = in_basis(state, basis);
    m.diagonal().setZero();
    return m.cwiseAbs().maxCoeff();
}

inline DiagonalState diagonalize_in_basis(const DensityMatrix &state, Basis basis,
                                          double tolerance = kDiagonalTolerance) {
    const double leak = off_diagonal_mass(state, basis);
    if (!(leak < tolerance)) {
        throw Error(ErrorCode::NotDiagonal, "state has off-diagonal magnitude " + std::to_string(leak) +
                                                " in the " + (basis == Basis::Z ? "Z" : "GHZ") + " basis");
    }
    return born_probabilities(state, basis);
}

} // namespace qntomo
