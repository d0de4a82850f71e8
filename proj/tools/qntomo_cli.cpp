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


#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qntomo/experiment.hpp"

namespace fs = std::filesystem;
using namespace qntomo;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kEstimation = 2, kInvariant = 3 };

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string scheme;
    std::string regime;
    std::string record;
};

ExperimentConfig load(const Options &o) {
    auto cfg = load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.scheme.empty()) {
        cfg.preset = parse_preset(o.scheme);
        cfg.custom.reset();
    }
    if (!o.regime.empty()) cfg.regime = parse_regime(o.regime);
    if (!o.out.empty()) cfg.out_dir = o.out;
    return cfg;
}

std::ofstream open_out(const std::string &dir, const std::string &name) {
    fs::create_directories(dir);
    const auto path = (fs::path(dir) / name).string();
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    return os;
}

int cmd_simulate(const Options &o) {
    const auto cfg = load(o);
    for (std::size_t i = 0; i < cfg.shots.size(); ++i) {
        const auto seed = derive_seed(cfg.seed, i, 0);
        const auto record = simulate_record(cfg, cfg.shots[i], seed);
        const auto name = cfg.shots.size() == 1 ? std::string("record.csv")
                                                : "record_N" + std::to_string(cfg.shots[i]) + ".csv";
        auto os = open_out(cfg.out_dir, name);
        write_record_csv(os, record);
        std::cout << "wrote " << (fs::path(cfg.out_dir) / name).string() << " (N=" << record.shots
                  << ", seed=" << seed << ")\n";
    }
    return kOk;
}

int cmd_estimate(const Options &o) {
    std::optional<ExperimentConfig> cfg;
    if (!o.config.empty()) cfg = load(o);
    OutcomeRecord record;
    if (!o.record.empty()) {
        std::ifstream in(o.record);
        if (!in) throw Error(ErrorCode::Io, "cannot open record '" + o.record + "'");
        record = read_record_csv(in);
    } else if (cfg) {
        record = simulate_record(*cfg, cfg->shots.front(), derive_seed(cfg->seed, 0, 0));
    } else {
        throw Error(ErrorCode::Config, "estimate needs --record or --config");
    }
    SchemePreset preset{};
    if (!o.scheme.empty()) preset = parse_preset(o.scheme);
    else if (cfg && cfg->preset) preset = *cfg->preset;
    else preset = parse_preset(record.scheme);
    Regime regime = Regime::Low;
    if (!o.regime.empty()) regime = parse_regime(o.regime);
    else if (cfg) regime = cfg->regime;

    const auto report = estimate(record, preset, regime);
    const auto dir = !o.out.empty() ? o.out : cfg ? cfg->out_dir : std::string(".");
    {
        auto os = open_out(dir, "estimate.json");
        os << report_json(report).dump(2) << '\n';
    }
    {
        auto os = open_out(dir, "estimate.csv");
        write_report_csv(os, report, record.seed);
    }
    std::cout << report_json(report).dump(2) << '\n';
    return kOk;
}

int cmd_convergence(const Options &o) {
    const auto cfg = load(o);
    const auto rows = run_convergence(cfg);
    auto os = open_out(cfg.out_dir, "convergence.csv");
    write_convergence_csv(os, cfg, rows);
    std::size_t failed = 0;
    for (const auto &r : rows) failed += (r.status != "ok" && r.status != "clamped") ? 1 : 0;
    std::cout << "wrote " << rows.size() << " rows to " << (fs::path(cfg.out_dir) / "convergence.csv").string();
    if (failed) std::cout << " (" << failed << " rows with estimator failures)";
    std::cout << '\n';
    return kOk;
}

int cmd_qfim(const Options &o) {
    const auto cfg = load(o);
    const auto q = qfim_for(cfg);
    {
        auto os = open_out(cfg.out_dir, "qfim.json");
        os << qfim_json(q).dump(2) << '\n';
    }
    {
        auto os = open_out(cfg.out_dir, "F.csv");
        write_matrix_csv(os, q.F);
    }
    if (q.invertible) {
        auto inv = open_out(cfg.out_dir, "F_inverse.csv");
        write_matrix_csv(inv, q.F_inverse);
        auto bound = open_out(cfg.out_dir, "qcrb.csv");
        write_qcrb_csv(bound, q, cfg.shots);
    }
    std::cout << qfim_json(q).dump(2) << '\n';
    return kOk;
}

int cmd_validate(const Options &o) {
    const auto cfg = load(o);
    const auto checks = run_validation(cfg);
    bool ok = true;
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto &c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        j.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        ok = ok && c.passed;
    }
    auto os = open_out(cfg.out_dir, "validation.json");
    os << j.dump(2) << '\n';
    return ok ? kOk : kInvariant;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Tomography of Pauli channels in quantum networks"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App *sub, bool config_required) {
        auto *c = sub->add_option("--config", o.config, "JSON experiment file");
        if (config_required) c->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "master seed (overrides config)");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--scheme", o.scheme, "Z_BASIS_X_CHANNELS, GHZ_X, GHZ_Y or GHZ_Z");
        sub->add_option("--regime", o.regime, "low or high");
    };
    auto *simulate = app.add_subcommand("simulate", "sample an outcome record");
    add_common(simulate, true);
    auto *est = app.add_subcommand("estimate", "estimate channel parameters from a record");
    add_common(est, false);
    est->add_option("--record", o.record, "record CSV")->check(CLI::ExistingFile);
    auto *conv = app.add_subcommand("convergence", "estimator sweep over the shot schedule");
    add_common(conv, true);
    auto *qf = app.add_subcommand("qfim", "Fisher information and Cramer-Rao bounds");
    add_common(qf, true);
    auto *val = app.add_subcommand("validate", "run the invariant suites");
    add_common(val, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }
    for (auto *sub : app.get_subcommands()) {
        if (sub->count("--seed")) o.seed = seed;
    }

    try {
        if (*simulate) return cmd_simulate(o);
        if (*est) return cmd_estimate(o);
        if (*conv) return cmd_convergence(o);
        if (*qf) return cmd_qfim(o);
        if (*val) return cmd_validate(o);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_estimation_failure() ? kEstimation : kInvalid;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kInvalid;
}
