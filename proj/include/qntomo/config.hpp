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
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qntomo/channels.hpp"
#include "qntomo/distribution.hpp"
#include "qntomo/error.hpp"
#include "qntomo/estimators.hpp"
#include "qntomo/topology.hpp"

namespace qntomo {

/// Hand-built circuit for the dense engine.
struct CustomScheme {
    CircuitSpec circuit;
    IndexMap eta;
    Basis basis = Basis::Z;
};

enum class Sampler { Multinomial, Shots };

/**
 * Experiment description loaded from a JSON file with sections
 * "topology", "channels", "scheme" and "experiment".
 */
struct ExperimentConfig {
    std::optional<RootedTree> tree;
    std::optional<int> star;  // set when the topology is a canonical star
    std::vector<ChannelModel> channels;
    std::optional<SchemePreset> preset;
    std::optional<CustomScheme> custom;
    Regime regime = Regime::Low;
    std::vector<std::uint64_t> shots;
    int trials = 1;
    std::uint64_t seed = 0;
    Sampler sampler = Sampler::Multinomial;
    std::string out_dir = ".";
    int threads = 0;  // 0: hardware concurrency

    [[nodiscard]] int channel_count() const { return static_cast<int>(channels.size()); }

    /// Identity probabilities per edge.
    [[nodiscard]] std::vector<double> theta() const {
        std::vector<double> t;
        for (const auto &c : channels) t.push_back(c.identity_weight());
        return t;
    }

    [[nodiscard]] const StarTopology star_topology() const {
        if (!star) {
            throw Error(ErrorCode::Config, "field 'topology': a star topology is required for preset schemes");
        }
        return StarTopology(*star);
    }

    [[nodiscard]] SchemePreset require_preset() const {
        if (!preset) {
            throw Error(ErrorCode::Config, "field 'scheme': a preset scheme is required for this command");
        }
        return *preset;
    }
};

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void field_error(const std::string &path, const std::string &msg) {
    throw Error(ErrorCode::Config, "field '" + path + "': " + msg);
}

inline const json &require(const json &obj, const std::string &key, const std::string &path) {
    if (!obj.is_object() || !obj.contains(key)) field_error(path + key, "missing");
    return obj.at(key);
}

inline std::int64_t as_int(const json &v, const std::string &path) {
    if (!v.is_number_integer()) field_error(path, "expected an integer");
    return v.get<std::int64_t>();
}

inline double as_double(const json &v, const std::string &path) {
    if (!v.is_number()) field_error(path, "expected a number");
    return v.get<double>();
}

inline std::string as_string(const json &v, const std::string &path) {
    if (!v.is_string()) field_error(path, "expected a string");
    return v.get<std::string>();
}

inline double unit_interval(const json &v, const std::string &path) {
    const double t = as_double(v, path);
    if (!(t >= 0.0 && t <= 1.0)) field_error(path, "theta must lie in [0,1]");
    return t;
}

inline void parse_topology(const json &t, ExperimentConfig &cfg) {
    if (t.contains("star")) {
        const auto n = as_int(t.at("star"), "topology.star");
        if (n < 2 || n > 20) field_error("topology.star", "star size must be in 2..20");
        cfg.star = static_cast<int>(n);
        cfg.tree = StarTopology(static_cast<int>(n)).tree();
        return;
    }
    const auto nodes = as_int(require(t, "nodes", "topology."), "topology.nodes");
    const auto root = as_int(require(t, "root", "topology."), "topology.root");
    std::vector<Edge> edges;
    const auto &e = require(t, "edges", "topology.");
    if (!e.is_array()) field_error("topology.edges", "expected a list of [a, b] pairs");
    for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string p = "topology.edges[" + std::to_string(i) + "]";
        if (!e[i].is_array() || e[i].size() != 2) field_error(p, "expected [a, b]");
        edges.push_back({static_cast<NodeId>(as_int(e[i][0], p)), static_cast<NodeId>(as_int(e[i][1], p))});
    }
    std::vector<NodeId> ends;
    const auto &en = require(t, "end_nodes", "topology.");
    if (!en.is_array()) field_error("topology.end_nodes", "expected a list");
    for (std::size_t i = 0; i < en.size(); ++i) {
        ends.push_back(static_cast<NodeId>(as_int(en[i], "topology.end_nodes[" + std::to_string(i) + "]")));
    }
    try {
        cfg.tree = RootedTree::build(static_cast<int>(nodes), std::move(edges), static_cast<NodeId>(root),
                                     std::move(ends));
    } catch (const Error &err) {
        field_error("topology", err.what());
    }
    if (const auto n = star_size(*cfg.tree)) cfg.star = *n;
}

inline ChannelModel parse_edge_channel(const json &c, const std::string &path) {
    if (c.contains("theta4")) {
        const auto &v = c.at("theta4");
        if (!v.is_array() || v.size() != 4) field_error(path + ".theta4", "expected four probabilities");
        std::vector<double> w;
        for (std::size_t k = 0; k < 4; ++k) w.push_back(unit_interval(v[k], path + ".theta4[" + std::to_string(k) + "]"));
        try {
            return make_depolarizing(w);
        } catch (const Error &err) {
            field_error(path + ".theta4", err.what());
        }
    }
    const auto axis_name = as_string(require(c, "axis", path + "."), path + ".axis");
    PauliAxis axis{};
    try {
        axis = parse_axis(axis_name);
    } catch (const Error &err) {
        field_error(path + ".axis", err.what());
    }
    return make_single_pauli(axis, unit_interval(require(c, "theta", path + "."), path + ".theta")).model();
}

inline void parse_channels(const json &c, ExperimentConfig &cfg) {
    if (c.is_array()) {
        for (std::size_t e = 0; e < c.size(); ++e) {
            cfg.channels.push_back(parse_edge_channel(c[e], "channels[" + std::to_string(e) + "]"));
        }
    } else if (c.is_object()) {
        const auto axis_name = as_string(require(c, "axis", "channels."), "channels.axis");
        PauliAxis axis{};
        try {
            axis = parse_axis(axis_name);
        } catch (const Error &err) {
            field_error("channels.axis", err.what());
        }
        const auto &th = require(c, "theta", "channels.");
        if (!th.is_array()) field_error("channels.theta", "expected one theta per edge");
        for (std::size_t e = 0; e < th.size(); ++e) {
            const double t = unit_interval(th[e], "channels.theta[" + std::to_string(e) + "]");
            cfg.channels.push_back(make_single_pauli(axis, t).model());
        }
    } else {
        field_error("channels", "expected an object with axis/theta or a per-edge list");
    }
    if (cfg.channels.empty()) field_error("channels", "no channels given");
    if (cfg.tree && cfg.channel_count() != cfg.tree->edge_count()) {
        field_error("channels", "expected " + std::to_string(cfg.tree->edge_count()) + " channels, got " +
                                    std::to_string(cfg.channel_count()));
    }
}

inline CustomScheme parse_custom(const json &c, const RootedTree &tree) {
    CustomScheme cs;
    const auto basis = as_string(require(c, "basis", "scheme.custom."), "scheme.custom.basis");
    if (basis == "Z") cs.basis = Basis::Z;
    else if (basis == "GHZ") cs.basis = Basis::Ghz;
    else field_error("scheme.custom.basis", "expected 'Z' or 'GHZ'");

    for (NodeId v = 0; v < tree.node_count(); ++v) {
        const int q = v == tree.root() ? std::max<int>(1, static_cast<int>(tree.successors(v).size()))
                                       : std::max<int>(1, static_cast<int>(tree.successors(v).size()));
        cs.circuit.nodes.push_back({q, {}});
    }
    const auto &nodes = require(c, "nodes", "scheme.custom.");
    if (!nodes.is_array()) field_error("scheme.custom.nodes", "expected a list");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string p = "scheme.custom.nodes[" + std::to_string(i) + "]";
        const auto v = as_int(require(nodes[i], "node", p + "."), p + ".node");
        if (v < 0 || v >= tree.node_count()) field_error(p + ".node", "node out of range");
        auto &nc = cs.circuit.nodes[static_cast<std::size_t>(v)];
        if (nodes[i].contains("qubits")) nc.qubits = static_cast<int>(as_int(nodes[i].at("qubits"), p + ".qubits"));
        if (nodes[i].contains("gates")) {
            const auto &gs = nodes[i].at("gates");
            if (!gs.is_array()) field_error(p + ".gates", "expected a list");
            for (std::size_t g = 0; g < gs.size(); ++g) {
                const std::string gp = p + ".gates[" + std::to_string(g) + "]";
                if (!gs[g].is_array() || gs[g].empty()) field_error(gp, "expected [NAME, slot, ...]");
                Gate gate{};
                try {
                    gate.kind = parse_gate(as_string(gs[g][0], gp));
                } catch (const Error &err) {
                    field_error(gp, err.what());
                }
                for (std::size_t s = 1; s < gs[g].size(); ++s) {
                    gate.slots.push_back(static_cast<int>(as_int(gs[g][s], gp)));
                }
                nc.gates.push_back(std::move(gate));
            }
        }
    }
    const auto &eta = require(c, "eta", "scheme.custom.");
    if (!eta.is_array()) field_error("scheme.custom.eta", "expected a list of [node, successor, slot]");
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const std::string p = "scheme.custom.eta[" + std::to_string(i) + "]";
        if (!eta[i].is_array() || eta[i].size() != 3) field_error(p, "expected [node, successor, slot]");
        cs.eta[{static_cast<NodeId>(as_int(eta[i][0], p)), static_cast<NodeId>(as_int(eta[i][1], p))}] =
            static_cast<int>(as_int(eta[i][2], p));
    }
    try {
        validate_circuit(tree, cs.circuit, cs.eta);
    } catch (const Error &err) {
        field_error("scheme.custom", err.what());
    }
    return cs;
}

inline void parse_experiment(const json &x, ExperimentConfig &cfg) {
    if (!x.is_object()) field_error("experiment", "expected an object");
    if (x.contains("regime")) {
        try {
            cfg.regime = parse_regime(as_string(x.at("regime"), "experiment.regime"));
        } catch (const Error &err) {
            field_error("experiment.regime", err.what());
        }
    }
    const auto &shots = require(x, "shots", "experiment.");
    if (shots.is_array()) {
        for (std::size_t i = 0; i < shots.size(); ++i) {
            cfg.shots.push_back(static_cast<std::uint64_t>(as_int(shots[i], "experiment.shots[" + std::to_string(i) + "]")));
            if (shots[i].get<std::int64_t>() < 1) field_error("experiment.shots[" + std::to_string(i) + "]", "must be >= 1");
        }
    } else {
        const auto n = as_int(shots, "experiment.shots");
        if (n < 1) field_error("experiment.shots", "must be >= 1");
        cfg.shots.push_back(static_cast<std::uint64_t>(n));
    }
    if (cfg.shots.empty()) field_error("experiment.shots", "empty schedule");
    for (std::size_t i = 1; i < cfg.shots.size(); ++i) {
        if (cfg.shots[i] <= cfg.shots[i - 1]) field_error("experiment.shots", "schedule must be strictly increasing");
    }
    if (x.contains("trials")) {
        const auto t = as_int(x.at("trials"), "experiment.trials");
        if (t < 1) field_error("experiment.trials", "must be >= 1");
        cfg.trials = static_cast<int>(t);
    }
    if (x.contains("seed")) {
        const auto &s = x.at("seed");
        if (!s.is_number_unsigned() && !s.is_number_integer()) field_error("experiment.seed", "expected an integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (x.contains("sampler")) {
        const auto s = as_string(x.at("sampler"), "experiment.sampler");
        if (s == "multinomial") cfg.sampler = Sampler::Multinomial;
        else if (s == "shots") cfg.sampler = Sampler::Shots;
        else field_error("experiment.sampler", "expected 'multinomial' or 'shots'");
    }
    if (x.contains("threads")) cfg.threads = static_cast<int>(as_int(x.at("threads"), "experiment.threads"));
    if (x.contains("out")) cfg.out_dir = as_string(x.at("out"), "experiment.out");
}

inline std::size_t line_of(const std::string &text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

} // namespace detail

inline ExperimentConfig parse_config(const std::string &text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::Config, "line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::Config, "top level must be an object");
    ExperimentConfig cfg;
    if (doc.contains("topology")) detail::parse_topology(doc.at("topology"), cfg);
    detail::parse_channels(detail::require(doc, "channels", ""), cfg);
    if (doc.contains("scheme")) {
        const auto &s = doc.at("scheme");
        if (s.is_string()) {
            try {
                cfg.preset = parse_preset(s.get<std::string>());
            } catch (const Error &err) {
                detail::field_error("scheme", err.what());
            }
        } else if (s.is_object() && s.contains("custom")) {
            if (!cfg.tree) detail::field_error("scheme.custom", "requires a topology");
            cfg.custom = detail::parse_custom(s.at("custom"), *cfg.tree);
        } else {
            detail::field_error("scheme", "expected a preset name or {\"custom\": {...}}");
        }
    }
    if (doc.contains("experiment")) {
        detail::parse_experiment(doc.at("experiment"), cfg);
    } else {
        cfg.shots = {1000};
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Checks that a preset can run on the configured network; throws unsupported-model otherwise.
inline void check_preset_compatible(const ExperimentConfig &cfg) {
    const auto preset = cfg.require_preset();
    const auto star = cfg.star_topology();
    if (cfg.channel_count() != star.size()) {
        throw Error(ErrorCode::Config, "field 'channels': one channel per star edge required");
    }
    flip_parameters(preset, cfg.channels);
}

} // namespace qntomo
