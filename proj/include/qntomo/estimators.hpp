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
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qntomo/distribution.hpp"
#include "qntomo/error.hpp"
#include "qntomo/labels.hpp"
#include "qntomo/measurement.hpp"

namespace qntomo {

/// Prior on theta_0 that breaks the two-solution symmetry of the Z-basis scheme.
enum class Regime { Low, High, None };

constexpr std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::Low: return "low";
        case Regime::High: return "high";
        case Regime::None: return "none";
    }
    return "?";
}

inline Regime parse_regime(std::string_view s) {
    if (s == "low") return Regime::Low;
    if (s == "high") return Regime::High;
    throw Error(ErrorCode::InvalidParameter, "regime must be 'low' or 'high', got '" + std::string(s) + "'");
}

struct EstimatorTolerances {
    double uninformative = 1e-6;  // |a_jk| below this: pair carries no information
    double discriminant = 1e-6;   // negative discriminants down to -this are clamped to 0
    double singular = 1e-6;       // |1 - 2 theta_0| below this: theta_j unrecoverable
};

struct EstimateDiagnostics {
    int pairs_used = 0;
    int pairs_skipped = 0;
    int clamps = 0;
    bool degenerate_std_error = false;
};

struct EstimateReport {
    std::string scheme;
    int n = 0;
    std::uint64_t shots = 0;
    /// One vector for GHZ schemes; for the Z scheme the regime-selected vector first, its mirror second.
    std::vector<std::vector<double>> candidates;
    Regime regime = Regime::None;
    bool identifiable = false;
    std::vector<double> std_errors;  // per parameter; identical for both Z-scheme candidates
    EstimateDiagnostics diagnostics;

    [[nodiscard]] const std::vector<double> &theta() const { return candidates.front(); }
};

/// Roots of a (1 - t) t + c = 0. `raw_*` are before clamping to [0,1] and always sum to 1.
struct PairRoots {
    double a = 0.0;
    double c = 0.0;
    double discriminant = 0.0;
    double raw_lower = 0.0;
    double raw_upper = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool discriminant_clamped = false;
};

/**
 * theta_0 candidates from one end-node pair.
 *
 * With a = 1 + 4 p_jk - 2 (p_j + p_k) and c = p_j p_k - p_jk the roots are
 * (1 +- sqrt(1 + 4c/a)) / 2.
 */
inline PairRoots solve_theta0_pair(double p_j, double p_k, double p_jk, const EstimatorTolerances &tol = {}) {
    for (double v : {p_j, p_k, p_jk}) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::InvalidParameter, "marginal outside [0,1]");
        }
    }
    PairRoots r;
    r.a = 1.0 + 4.0 * p_jk - 2.0 * (p_j + p_k);
    r.c = p_j * p_k - p_jk;
    if (std::abs(r.a) < tol.uninformative) {
        throw Error(ErrorCode::UninformativePair, "a_jk = " + std::to_string(r.a));
    }
    r.discriminant = 1.0 + 4.0 * r.c / r.a;
    if (r.discriminant < -tol.discriminant) {
        throw Error(ErrorCode::InconsistentStatistics, "discriminant " + std::to_string(r.discriminant));
    }
    if (r.discriminant < 0.0) {
        r.discriminant = 0.0;
        r.discriminant_clamped = true;
    }
    const double root = std::sqrt(r.discriminant);
    r.raw_lower = 0.5 * (1.0 - root);
    r.raw_upper = 0.5 * (1.0 + root);
    r.lower = std::clamp(r.raw_lower, 0.0, 1.0);
    r.upper = std::clamp(r.raw_upper, 0.0, 1.0);
    return r;
}

namespace detail {

inline double clamp_unit(double v, int &clamps) {
    if (v < 0.0 || v > 1.0) {
        ++clamps;
        return std::clamp(v, 0.0, 1.0);
    }
    return v;
}

// Finite-difference gradient of `g` w.r.t. each label frequency, then
// se^2 = grad^T (diag(pi) - pi pi^T) grad / N per output component.
inline std::vector<double> delta_method(const std::vector<double> &freq, std::uint64_t shots, std::size_t outputs,
                                        const std::function<std::vector<double>(const std::vector<double> &)> &g) {
    const auto m = static_cast<Eigen::Index>(freq.size());
    Eigen::MatrixXd grad(static_cast<Eigen::Index>(outputs), m);
    constexpr double h = 1e-6;
    std::vector<double> probe = freq;
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        // Forward differences where a backward step would leave the simplex.
        const bool central = freq[ks] >= h;
        probe[ks] = freq[ks] + h;
        const auto up = g(probe);
        probe[ks] = central ? freq[ks] - h : freq[ks];
        const auto down = g(probe);
        probe[ks] = freq[ks];
        const double span = central ? 2.0 * h : h;
        for (std::size_t o = 0; o < outputs; ++o) {
            grad(static_cast<Eigen::Index>(o), k) = (up[o] - down[o]) / span;
        }
    }
    Eigen::VectorXd pi = Eigen::Map<const Eigen::VectorXd>(freq.data(), m);
    const Eigen::MatrixXd cov = (Eigen::MatrixXd(pi.asDiagonal()) - pi * pi.transpose()) / static_cast<double>(shots);
    std::vector<double> se(outputs);
    for (std::size_t o = 0; o < outputs; ++o) {
        const auto row = grad.row(static_cast<Eigen::Index>(o));
        se[o] = std::sqrt(std::max(0.0, (row * cov * row.transpose())(0, 0)));
    }
    return se;
}

} // namespace detail

/**
 * Z-basis quadratic estimator.
 *
 * Solves the pair quadratic for every informative pair, keeps the root above
 * 1/2 (low regime) or below (high), averages, and recovers theta_j from
 * p_j = theta_0 (1 - theta_j) + (1 - theta_0) theta_j. Both mirror-image
 * candidates are reported; the scheme never identifies theta on its own.
 */
inline EstimateReport estimate_z_scheme(const Marginals &m, Regime regime, const EstimatorTolerances &tol = {}) {
    if (regime == Regime::None) {
        throw Error(ErrorCode::InvalidParameter, "the Z-basis estimator needs a low or high regime");
    }
    const int n = m.n();
    if (n < 3) {
        throw Error(ErrorCode::EstimationFailed, "need at least two measuring end-nodes (n >= 3)");
    }
    EstimateReport rep;
    rep.scheme = std::string(to_string(SchemePreset::ZBasis));
    rep.n = n;
    rep.shots = m.shots();
    rep.regime = regime;
    rep.identifiable = false;

    double sum = 0.0;
    for (int j = 1; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            try {
                const auto roots = solve_theta0_pair(m.p(j), m.p(k), m.pair(j, k), tol);
                sum += regime == Regime::Low ? roots.upper : roots.lower;
                ++rep.diagnostics.pairs_used;
            } catch (const Error &e) {
                if (e.code() != ErrorCode::UninformativePair && e.code() != ErrorCode::InconsistentStatistics) throw;
                ++rep.diagnostics.pairs_skipped;
            }
        }
    }
    if (rep.diagnostics.pairs_used == 0) {
        throw Error(ErrorCode::EstimationFailed, "no informative end-node pair");
    }
    const double theta0 = sum / rep.diagnostics.pairs_used;
    const double denom = 1.0 - 2.0 * theta0;
    if (std::abs(denom) < tol.singular) {
        throw Error(ErrorCode::SingularParameter, "theta_0 = 0.5 leaves theta_j unidentifiable");
    }
    std::vector<double> first{theta0};
    for (int j = 1; j < n; ++j) first.push_back((m.p(j) - theta0) / denom);
    std::vector<double> second;
    for (double v : first) second.push_back(1.0 - v);
    for (auto *cand : {&first, &second}) {
        for (auto &v : *cand) v = detail::clamp_unit(v, rep.diagnostics.clamps);
    }
    rep.candidates = {std::move(first), std::move(second)};
    return rep;
}

inline EstimateReport estimate_z_scheme(const OutcomeRecord &record, Regime regime,
                                        const EstimatorTolerances &tol = {}) {
    if (record.kind != LabelKind::Bits) {
        throw Error(ErrorCode::WrongScheme, "Z-basis estimator needs a bit-string record");
    }
    auto rep = estimate_z_scheme(marginals(record), regime, tol);
    const auto freq = record.frequencies();
    const int n = record.n;
    auto g = [&](const std::vector<double> &f) {
        try {
            return estimate_z_scheme(Marginals::from_distribution(n, f), regime, tol).candidates.front();
        } catch (const Error &) {
            return std::vector<double>(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
        }
    };
    rep.std_errors = detail::delta_method(freq, record.shots, static_cast<std::size_t>(n), g);
    return rep;
}

/// Per-shot flip pattern implied by a GHZ label; bit e set means channel e flipped.
inline std::uint64_t decode_ghz_flips(PauliAxis axis, const GhzLabel &label) {
    const int n = label.qubits;
    std::uint64_t flips = 0;
    int f0 = label.b;
    if (axis == PauliAxis::Y) {
        if (n % 2 == 0) {
            throw Error(ErrorCode::UnsupportedModel, "GHZ decoding of Y channels needs an odd number of end-nodes");
        }
        int parity = 0;
        for (int j = 1; j < n; ++j) parity ^= label.s_bit(j);
        f0 = label.b ^ parity;
    }
    flips |= static_cast<std::uint64_t>(f0);
    for (int j = 1; j < n; ++j) {
        const int fj = axis == PauliAxis::Y ? (label.s_bit(j) ^ f0) : label.s_bit(j);
        flips |= static_cast<std::uint64_t>(fj) << j;
    }
    return flips;
}

/// GHZ decoding estimator from label frequencies: theta_e = 1 - Pr[channel e flipped].
inline EstimateReport estimate_ghz_scheme(const std::vector<double> &freq, int n, PauliAxis axis, std::uint64_t shots) {
    if (n < 1 || freq.size() != label_count(n)) {
        throw Error(ErrorCode::LabelMismatch, "GHZ frequencies do not match star size");
    }
    std::vector<double> flip_rate(static_cast<std::size_t>(n), 0.0);
    for (std::size_t idx = 0; idx < freq.size(); ++idx) {
        if (freq[idx] == 0.0) continue;
        const auto flips = decode_ghz_flips(axis, GhzLabel::unpack(n, idx));
        for (int e = 0; e < n; ++e) {
            if ((flips >> e) & 1U) flip_rate[static_cast<std::size_t>(e)] += freq[idx];
        }
    }
    EstimateReport rep;
    rep.scheme = axis == PauliAxis::X ? "GHZ_X" : (axis == PauliAxis::Y ? "GHZ_Y" : "GHZ_Z");
    rep.n = n;
    rep.shots = shots;
    rep.regime = Regime::None;
    rep.identifiable = true;
    std::vector<double> theta;
    for (double r : flip_rate) theta.push_back(detail::clamp_unit(1.0 - r, rep.diagnostics.clamps));
    rep.candidates = {theta};
    if (shots > 0) {
        for (double t : theta) {
            const double v = t * (1.0 - t);
            if (v == 0.0) rep.diagnostics.degenerate_std_error = true;
            rep.std_errors.push_back(std::sqrt(v / static_cast<double>(shots)));
        }
    }
    return rep;
}

inline EstimateReport estimate_ghz_scheme(const OutcomeRecord &record, PauliAxis axis) {
    if (record.kind != LabelKind::Ghz) {
        throw Error(ErrorCode::WrongScheme, "GHZ estimator needs a GHZ-label record");
    }
    const std::string expected = axis == PauliAxis::X ? "GHZ_X" : (axis == PauliAxis::Y ? "GHZ_Y" : "GHZ_Z");
    if (!record.scheme.empty() && record.scheme != expected) {
        throw Error(ErrorCode::WrongScheme, "record scheme " + record.scheme + " does not match " + expected);
    }
    return estimate_ghz_scheme(record.frequencies(), record.n, axis, record.shots);
}

/// Standard errors of an already-computed report (binomial for GHZ, delta method for Z).
inline std::vector<double> std_errors(const EstimateReport &report, const OutcomeRecord &record) {
    if (report.scheme.rfind("GHZ", 0) == 0) {
        std::vector<double> se;
        for (double t : report.theta()) se.push_back(std::sqrt(t * (1.0 - t) / static_cast<double>(record.shots)));
        return se;
    }
    return estimate_z_scheme(record, report.regime).std_errors;
}

/// Dispatch on preset.
inline EstimateReport estimate(const OutcomeRecord &record, SchemePreset preset, Regime regime) {
    if (preset == SchemePreset::ZBasis) {
        return estimate_z_scheme(record, regime);
    }
    return estimate_ghz_scheme(record, axis_of(preset));
}

} // namespace qntomo
