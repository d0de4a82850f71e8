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
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qntomo/error.hpp"

namespace qntomo {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using MatrixXc = Eigen::MatrixXcd;

enum class PauliAxis { X, Y, Z };

constexpr std::string_view to_string(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::X: return "X";
        case PauliAxis::Y: return "Y";
        case PauliAxis::Z: return "Z";
    }
    return "?";
}

inline PauliAxis parse_axis(std::string_view s) {
    if (s == "X" || s == "x") return PauliAxis::X;
    if (s == "Y" || s == "y") return PauliAxis::Y;
    if (s == "Z" || s == "z") return PauliAxis::Z;
    throw Error(ErrorCode::InvalidParameter, "unknown Pauli axis '" + std::string(s) + "'");
}

namespace pauli {

inline Matrix2c identity() { return Matrix2c::Identity(); }

inline Matrix2c x() {
    Matrix2c m;
    m << 0, 1, 1, 0;
    return m;
}

// Y = [[0, -i], [i, 0]]
inline Matrix2c y() {
    Matrix2c m;
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline Matrix2c z() {
    Matrix2c m;
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix2c of(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::X: return x();
        case PauliAxis::Y: return y();
        case PauliAxis::Z: return z();
    }
    return identity();
}

} // namespace pauli

inline constexpr double kChannelTolerance = 1e-12;

/// Mixed-unitary qubit channel rho -> sum_k theta_k U_k rho U_k^dagger.
class ChannelModel {
  public:
    ChannelModel(std::vector<Matrix2c> unitaries, std::vector<double> theta)
        : unitaries_(std::move(unitaries)), theta_(std::move(theta)) {
        if (unitaries_.empty() || unitaries_.size() != theta_.size()) {
            throw Error(ErrorCode::InvalidParameter, "unitary and probability lists must be non-empty and equal length");
        }
        double sum = 0.0;
        for (double t : theta_) {
            if (!(t >= 0.0 && t <= 1.0)) {
                throw Error(ErrorCode::InvalidParameter, "channel probability outside [0,1]");
            }
            sum += t;
        }
        if (std::abs(sum - 1.0) > kChannelTolerance) {
            throw Error(ErrorCode::InvalidParameter, "channel probabilities do not sum to 1");
        }
        for (const auto &u : unitaries_) {
            if ((u.adjoint() * u - Matrix2c::Identity()).cwiseAbs().maxCoeff() > kChannelTolerance) {
                throw Error(ErrorCode::InvalidParameter, "channel operator is not unitary");
            }
        }
    }

    [[nodiscard]] const std::vector<Matrix2c> &unitaries() const noexcept { return unitaries_; }
    [[nodiscard]] const std::vector<double> &theta() const noexcept { return theta_; }
    [[nodiscard]] std::size_t size() const noexcept { return theta_.size(); }

    [[nodiscard]] Matrix2c apply(const Matrix2c &rho) const {
        Matrix2c out = Matrix2c::Zero();
        for (std::size_t k = 0; k < size(); ++k) {
            out += theta_[k] * unitaries_[k] * rho * unitaries_[k].adjoint();
        }
        return out;
    }

    /// K_k = sqrt(theta_k) U_k, zero-weight terms dropped.
    [[nodiscard]] std::vector<Matrix2c> kraus_operators() const {
        std::vector<Matrix2c> ops;
        for (std::size_t k = 0; k < size(); ++k) {
            if (theta_[k] > 0.0) {
                ops.push_back(std::sqrt(theta_[k]) * unitaries_[k]);
            }
        }
        return ops;
    }

    /// The Pauli axis when this channel is I/sigma mixing on a single axis.
    [[nodiscard]] std::optional<PauliAxis> single_pauli_axis() const {
        std::optional<PauliAxis> axis;
        for (std::size_t k = 0; k < size(); ++k) {
            if (theta_[k] == 0.0 || is_proportional(unitaries_[k], pauli::identity())) {
                continue;
            }
            std::optional<PauliAxis> match;
            for (PauliAxis a : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
                if (is_proportional(unitaries_[k], pauli::of(a))) {
                    match = a;
                }
            }
            if (!match || (axis && *axis != *match)) {
                return std::nullopt;
            }
            axis = match;
        }
        return axis;
    }

    /// Total weight on the identity component.
    [[nodiscard]] double identity_weight() const {
        double w = 0.0;
        for (std::size_t k = 0; k < size(); ++k) {
            if (is_proportional(unitaries_[k], pauli::identity())) {
                w += theta_[k];
            }
        }
        return w;
    }

  private:
    // Equal up to a global phase.
    static bool is_proportional(const Matrix2c &u, const Matrix2c &p) {
        const Complex overlap = (p.adjoint() * u).trace() / 2.0;
        return std::abs(std::abs(overlap) - 1.0) < 1e-9;
    }

    std::vector<Matrix2c> unitaries_;
    std::vector<double> theta_;
};

/// theta * rho + (1 - theta) * sigma rho sigma; theta is the no-error probability.
struct SinglePauliChannel {
    PauliAxis axis = PauliAxis::X;
    double theta = 1.0;

    [[nodiscard]] ChannelModel model() const {
        return ChannelModel({pauli::identity(), pauli::of(axis)}, {theta, 1.0 - theta});
    }
};

inline SinglePauliChannel make_single_pauli(PauliAxis axis, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "theta must lie in [0,1]");
    }
    return {axis, theta};
}

/// Generic depolarizing channel with weights on (I, X, Y, Z).
inline ChannelModel make_depolarizing(const std::vector<double> &theta4) {
    if (theta4.size() != 4) {
        throw Error(ErrorCode::InvalidParameter, "depolarizing channel needs four probabilities");
    }
    return ChannelModel({pauli::identity(), pauli::x(), pauli::y(), pauli::z()}, theta4);
}

inline std::vector<Matrix2c> kraus_operators(const ChannelModel &channel) { return channel.kraus_operators(); }

/// 1 when the Pauli error fires (probability 1 - theta).
template <class Rng>
int sample_flip(const SinglePauliChannel &channel, Rng &rng) {
    if (channel.theta >= 1.0) return 0;
    if (channel.theta <= 0.0) return 1;
    std::bernoulli_distribution flip(1.0 - channel.theta);
    return flip(rng) ? 1 : 0;
}

/// Same-axis composition: the error survives iff exactly one of the two fires.
inline SinglePauliChannel compose(const SinglePauliChannel &a, const SinglePauliChannel &b) {
    if (a.axis != b.axis) {
        throw Error(ErrorCode::UnsupportedModel, "composition requires a shared Pauli axis");
    }
    return {a.axis, a.theta * b.theta + (1.0 - a.theta) * (1.0 - b.theta)};
}

} // namespace qntomo
