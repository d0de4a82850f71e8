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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qntomo/config.hpp"
#include "qntomo/dense_engine.hpp"
#include "qntomo/distribution.hpp"
#include "qntomo/estimators.hpp"
#include "qntomo/fisher.hpp"
#include "qntomo/measurement.hpp"
#include "qntomo/rng.hpp"

namespace qntomo {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be written by index.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &fn) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) t.join();
    for (const auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// One outcome record for the configured scheme.
inline OutcomeRecord simulate_record(const ExperimentConfig &cfg, std::uint64_t shots, std::uint64_t seed) {
    if (cfg.custom) {
        const auto run = distribute_dense(*cfg.tree, cfg.custom->circuit, cfg.custom->eta, cfg.channels);
        auto r = measure_dense(run.state, cfg.custom->basis, shots, seed);
        r.scheme = "CUSTOM";
        r.n = cfg.channel_count();
        return r;
    }
    check_preset_compatible(cfg);
    const auto preset = *cfg.preset;
    const int n = cfg.channel_count();
    const auto frame = make_flip_frame(preset, n);
    const auto theta = flip_parameters(preset, cfg.channels);
    if (cfg.sampler == Sampler::Multinomial) {
        return sample(exact_distribution(frame, theta), shots, seed, std::string(to_string(preset)), n);
    }
    Rng rng(seed);
    OutcomeRecord r;
    r.scheme = std::string(to_string(preset));
    r.n = n;
    r.kind = frame.kind;
    r.qubits = frame.qubits;
    r.shots = shots;
    r.seed = seed;
    r.counts = sample_shots(frame, theta, shots, rng);
    return r;
}

// ---------------------------------------------------------------------------
// Convergence

struct ConvergenceRow {
    std::uint64_t shots = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    int parameter = 0;
    int candidate = 0;
    double theta_hat = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    Regime regime = Regime::None;
    bool identifiable = false;
    std::string status = "ok";
};

inline constexpr const char *kConvergenceFormat = "qntomo-convergence v1";

/// Rows of one (N, trial) cell. Estimator failures become status rows rather than errors.
inline std::vector<ConvergenceRow> convergence_cell(const ExperimentConfig &cfg, std::size_t stage, int trial) {
    const auto shots = cfg.shots[stage];
    const auto seed = derive_seed(cfg.seed, stage, static_cast<std::uint64_t>(trial));
    const int n = cfg.channel_count();
    std::vector<ConvergenceRow> rows;
    try {
        const auto record = simulate_record(cfg, shots, seed);
        const auto report = estimate(record, *cfg.preset, cfg.regime);
        for (std::size_t c = 0; c < report.candidates.size(); ++c) {
            for (int j = 0; j < n; ++j) {
                ConvergenceRow row;
                row.shots = shots;
                row.trial = trial;
                row.seed = seed;
                row.parameter = j;
                row.candidate = static_cast<int>(c);
                row.theta_hat = report.candidates[c][static_cast<std::size_t>(j)];
                row.std_error = report.std_errors.empty() ? row.std_error : report.std_errors[static_cast<std::size_t>(j)];
                row.regime = report.regime;
                row.identifiable = report.identifiable;
                row.status = report.diagnostics.clamps > 0 ? "clamped" : "ok";
                rows.push_back(row);
            }
        }
    } catch (const Error &e) {
        if (!e.is_estimation_failure()) throw;
        for (int j = 0; j < n; ++j) {
            ConvergenceRow row;
            row.shots = shots;
            row.trial = trial;
            row.seed = seed;
            row.parameter = j;
            row.regime = cfg.regime;
            row.status = std::string(to_string(e.code()));
            rows.push_back(row);
        }
    }
    return rows;
}

/// Full schedule x trials sweep. Row order is (N, trial, candidate, parameter) regardless of threading.
inline std::vector<ConvergenceRow> run_convergence(const ExperimentConfig &cfg) {
    check_preset_compatible(cfg);
    const std::size_t trials = static_cast<std::size_t>(cfg.trials);
    const std::size_t cells = cfg.shots.size() * trials;
    std::vector<std::vector<ConvergenceRow>> out(cells);
    parallel_for(cells, cfg.threads, [&](std::size_t i) {
        out[i] = convergence_cell(cfg, i / trials, static_cast<int>(i % trials));
    });
    std::vector<ConvergenceRow> rows;
    for (auto &cell : out) rows.insert(rows.end(), cell.begin(), cell.end());
    return rows;
}

namespace detail {
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}
} // namespace detail

inline void write_convergence_csv(std::ostream &os, const ExperimentConfig &cfg, const std::vector<ConvergenceRow> &rows) {
    os << "# " << kConvergenceFormat << "\n";
    os << "# scheme=" << (cfg.preset ? to_string(*cfg.preset) : "CUSTOM") << " n=" << cfg.channel_count()
       << " master_seed=" << cfg.seed << " trials=" << cfg.trials << "\n";
    os << "N,trial,seed,param,candidate,theta_hat,std_error,regime,identifiable,status\n";
    for (const auto &r : rows) {
        os << r.shots << ',' << r.trial << ',' << r.seed << ',' << r.parameter << ',' << r.candidate << ','
           << detail::fmt_double(r.theta_hat) << ',' << detail::fmt_double(r.std_error) << ',' << to_string(r.regime)
           << ',' << (r.identifiable ? 1 : 0) << ',' << r.status << '\n';
    }
}

// ---------------------------------------------------------------------------
// Estimate output

inline nlohmann::ordered_json report_json(const EstimateReport &r) {
    nlohmann::ordered_json j;
    j["scheme"] = r.scheme;
    j["n"] = r.n;
    j["shots"] = r.shots;
    j["regime"] = std::string(to_string(r.regime));
    j["identifiable"] = r.identifiable;
    j["candidates"] = r.candidates;
    j["std_errors"] = r.std_errors;
    j["diagnostics"] = {{"pairs_used", r.diagnostics.pairs_used},
                        {"pairs_skipped", r.diagnostics.pairs_skipped},
                        {"clamps", r.diagnostics.clamps},
                        {"degenerate_std_error", r.diagnostics.degenerate_std_error}};
    return j;
}

/// One row per candidate: N, seed, candidate, theta_0.., se_0.., regime, identifiable.
inline void write_report_csv(std::ostream &os, const EstimateReport &r, std::uint64_t seed) {
    os << "N,seed,candidate";
    for (int j = 0; j < r.n; ++j) os << ",theta_" << j;
    for (int j = 0; j < r.n; ++j) os << ",se_" << j;
    os << ",regime,identifiable\n";
    for (std::size_t c = 0; c < r.candidates.size(); ++c) {
        os << r.shots << ',' << seed << ',' << c;
        for (double t : r.candidates[c]) os << ',' << detail::fmt_double(t);
        for (int j = 0; j < r.n; ++j) {
            os << ',' << detail::fmt_double(r.std_errors.empty() ? std::nan("") : r.std_errors[static_cast<std::size_t>(j)]);
        }
        os << ',' << to_string(r.regime) << ',' << (r.identifiable ? 1 : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Fisher information output

inline QfimResult qfim_for(const ExperimentConfig &cfg) {
    const auto preset = cfg.require_preset();
    const auto theta = flip_parameters(preset, cfg.channels);
    return qfim(model_for(preset, cfg.channel_count()), theta);
}

inline void write_matrix_csv(std::ostream &os, const Eigen::MatrixXd &m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << detail::fmt_double(m(i, j));
        }
        os << '\n';
    }
}

/// Per-N bound table: N, param, variance bound, standard-deviation bound.
inline void write_qcrb_csv(std::ostream &os, const QfimResult &q, const std::vector<std::uint64_t> &shots) {
    os << "N,param,variance_bound,std_bound\n";
    for (auto N : shots) {
        for (Eigen::Index j = 0; j < q.F_inverse.rows(); ++j) {
            const double v = q.F_inverse(j, j) / static_cast<double>(N);
            os << N << ',' << j << ',' << detail::fmt_double(v) << ',' << detail::fmt_double(std::sqrt(v)) << '\n';
        }
    }
}

inline nlohmann::ordered_json qfim_json(const QfimResult &q) {
    auto rows = [](const Eigen::MatrixXd &m) {
        std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
        }
        return out;
    };
    nlohmann::ordered_json j;
    j["invertible"] = q.invertible;
    j["boundary_singular"] = q.boundary_singular;
    j["F"] = rows(q.F);
    j["spectrum"] = std::vector<double>(q.spectrum.data(), q.spectrum.data() + q.spectrum.size());
    if (q.invertible) {
        j["condition_number"] = q.condition_number();
        j["F_inverse"] = rows(q.F_inverse);
    } else {
        nlohmann::ordered_json null_dirs = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < q.null_space.cols(); ++c) {
            null_dirs.push_back(std::vector<double>(q.null_space.col(c).data(),
                                                    q.null_space.col(c).data() + q.null_space.rows()));
        }
        j["null_space"] = null_dirs;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Invariant suites

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

inline std::vector<std::vector<double>> theta_grid(int n, const std::vector<double> &values) {
    std::vector<std::vector<double>> out;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= values.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<double> t;
        std::size_t r = idx;
        for (int i = 0; i < n; ++i) {
            t.push_back(values[r % values.size()]);
            r /= values.size();
        }
        out.push_back(std::move(t));
    }
    return out;
}

inline DensityMatrix random_density(int qubits, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    const auto d = Eigen::Index{1} << qubits;
    MatrixXc a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    MatrixXc rho = a * a.adjoint();
    rho /= rho.trace();
    return DensityMatrix(qubits, rho);
}

} // namespace detail

/// Dense check of the exact Pauli action on every GHZ label, n <= 4.
inline CheckResult check_ghz_pauli_table() {
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
        for (LabelIndex idx = 0; idx < label_count(n); ++idx) {
            const auto label = GhzLabel::unpack(n, idx);
            const auto psi = ghz_vector(label);
            for (auto axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
                for (int j = 0; j < n; ++j) {
                    const auto img = ghz_pauli_action(label, axis, j);
                    const VectorXc lhs = apply_to_vector(psi, pauli::of(axis), n, j);
                    const VectorXc rhs = img.phase * ghz_vector(img.label);
                    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
                }
            }
        }
    }
    return {"ghz-pauli-table", worst < 1e-12, "max deviation " + detail::sci(worst)};
}

/// Dense engine against flip engine on a theta grid for every preset that accepts `axis`.
inline CheckResult check_engine_equivalence(int n) {
    const std::vector<double> values = n <= 3 ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}
                                              : std::vector<double>{0.1, 0.6, 1.0};
    const StarTopology star(n);
    double worst = 0.0;
    int cases = 0;
    for (auto preset : {SchemePreset::ZBasis, SchemePreset::GhzX, SchemePreset::GhzY, SchemePreset::GhzZ}) {
        const auto axes = preset == SchemePreset::ZBasis ? std::vector<PauliAxis>{PauliAxis::X, PauliAxis::Y}
                                                         : std::vector<PauliAxis>{axis_of(preset)};
        for (auto axis : axes) {
            for (const auto &theta : detail::theta_grid(n, values)) {
                const auto channels = single_pauli_network(axis, theta);
                const auto dense = distribute(star, preset, channels, Engine::Dense);
                const auto flip = distribute(star, preset, channels, Engine::Flip);
                for (std::size_t k = 0; k < dense.size(); ++k) {
                    worst = std::max(worst, std::abs(dense.probabilities[k] - flip.probabilities[k]));
                }
                ++cases;
            }
        }
    }
    return {"engine-equivalence", worst < 1e-10,
            std::to_string(cases) + " cases, max deviation " + detail::sci(worst)};
}

/// Channels preserve trace and positivity on random states.
inline CheckResult check_kraus(const std::vector<ChannelModel> &channels) {
    double trace_err = 0.0;
    double min_eig = 0.0;
    double completeness = 0.0;
    for (std::size_t c = 0; c < channels.size(); ++c) {
        Matrix2c sum = Matrix2c::Zero();
        for (const auto &k : channels[c].kraus_operators()) sum += k.adjoint() * k;
        completeness = std::max(completeness, (sum - Matrix2c::Identity()).cwiseAbs().maxCoeff());
        for (int trial = 0; trial < 4; ++trial) {
            auto rho = detail::random_density(3, derive_seed(0x6b72, c, static_cast<std::uint64_t>(trial)));
            rho.apply_channel(channels[c], trial % 3);
            trace_err = std::max(trace_err, std::abs(rho.trace() - Complex(1.0, 0.0)));
            min_eig = std::min(min_eig, rho.min_eigenvalue());
        }
    }
    const bool ok = completeness < 1e-12 && trace_err < 1e-12 && min_eig > -1e-12;
    return {"kraus-trace-positivity", ok,
            "completeness " + detail::sci(completeness) + ", trace " + detail::sci(trace_err) + ", min eigenvalue " +
                detail::sci(min_eig)};
}

/// Analytic eigenvalue gradients against central differences on an interior grid.
inline CheckResult check_qfim_gradients(int n) {
    double worst = 0.0;
    std::vector<EigenvalueModel> models;
    if (n >= 2) models.push_back(z_scheme_model(n));
    models.push_back(ghz_model(n, PauliAxis::X));
    models.push_back(ghz_model(n, PauliAxis::Z));
    if (n % 2 == 1) models.push_back(ghz_model(n, PauliAxis::Y));
    const std::vector<double> values = n <= 3 ? std::vector<double>{0.2, 0.5, 0.8} : std::vector<double>{0.3, 0.7};
    for (const auto &model : models) {
        for (const auto &theta : detail::theta_grid(n, values)) {
            const auto a = qfim(model, theta);
            const auto f = qfim_finite_difference(model, theta);
            const double scale = std::max(1.0, a.F.cwiseAbs().maxCoeff());
            worst = std::max(worst, (a.F - f.F).cwiseAbs().maxCoeff() / scale);
        }
    }
    return {"qfim-finite-difference", worst < 1e-6, "max relative deviation " + detail::sci(worst)};
}

/// The dense final state of a custom circuit must be diagonal in its declared basis.
inline CheckResult check_custom_diagonal(const ExperimentConfig &cfg) {
    const auto run = distribute_dense(*cfg.tree, cfg.custom->circuit, cfg.custom->eta, cfg.channels);
    const double leak = off_diagonal_mass(run.state, cfg.custom->basis);
    return {"custom-circuit-diagonal", leak < kDiagonalTolerance, "off-diagonal magnitude " + detail::sci(leak)};
}

/// Every invariant suite applicable to `cfg`.
inline std::vector<CheckResult> run_validation(const ExperimentConfig &cfg) {
    std::vector<CheckResult> out;
    out.push_back(check_ghz_pauli_table());
    const int n = std::clamp(cfg.star.value_or(3), 2, 5);
    out.push_back(check_engine_equivalence(n));
    out.push_back(check_kraus(cfg.channels));
    out.push_back(check_qfim_gradients(std::min(cfg.channel_count(), 5)));
    if (cfg.custom) {
        try {
            out.push_back(check_custom_diagonal(cfg));
        } catch (const Error &e) {
            out.push_back({"custom-circuit-diagonal", false, e.what()});
        }
    }
    return out;
}

} // namespace qntomo
