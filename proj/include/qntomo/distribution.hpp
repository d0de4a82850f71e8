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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qntomo/channels.hpp"
#include "qntomo/dense_engine.hpp"
#include "qntomo/error.hpp"
#include "qntomo/gates.hpp"
#include "qntomo/labels.hpp"
#include "qntomo/topology.hpp"

namespace qntomo {

/**
 * Register and gate list of one node.
 *
 * For non-root nodes slot 0 holds the qubit received from the predecessor and
 * the remaining slots start in |0>. The root starts with every slot in |0>.
 * Gates are applied in list order.
 */
struct NodeCircuit {
    int qubits = 1;
    std::vector<Gate> gates;
};

struct CircuitSpec {
    std::vector<NodeCircuit> nodes;  // indexed by node id
};

/// eta(v, u): slot of v's register sent to successor u.
using IndexMap = std::map<std::pair<NodeId, NodeId>, int>;

inline void validate_circuit(const RootedTree &tree, const CircuitSpec &circuit, const IndexMap &eta) {
    if (static_cast<int>(circuit.nodes.size()) != tree.node_count()) {
        throw Error(ErrorCode::InvalidCircuit, "circuit must describe every node");
    }
    for (NodeId v = 0; v < tree.node_count(); ++v) {
        const auto &node = circuit.nodes[static_cast<std::size_t>(v)];
        const auto &succ = tree.successors(v);
        const int needed = std::max<int>(1, static_cast<int>(succ.size()));
        const std::string where = "node " + std::to_string(v);
        if (node.qubits < needed) {
            throw Error(ErrorCode::InvalidCircuit, where + " needs at least " + std::to_string(needed) + " qubits");
        }
        if (!tree.is_end_node(v) && node.qubits != static_cast<int>(succ.size())) {
            throw Error(ErrorCode::InvalidCircuit, where + " is intermediate and may not retain qubits");
        }
        for (const auto &g : node.gates) {
            check_gate_arity(g);
            for (int s : g.slots) {
                if (s < 0 || s >= node.qubits) {
                    throw Error(ErrorCode::InvalidCircuit, where + ": gate slot " + std::to_string(s) + " out of range");
                }
            }
        }
        std::vector<int> used;
        for (NodeId u : succ) {
            const auto it = eta.find({v, u});
            if (it == eta.end()) {
                throw Error(ErrorCode::InvalidCircuit,
                            "eta(" + std::to_string(v) + ", " + std::to_string(u) + ") undefined");
            }
            if (it->second < 0 || it->second >= node.qubits) {
                throw Error(ErrorCode::InvalidCircuit,
                            "eta(" + std::to_string(v) + ", " + std::to_string(u) + ") out of range");
            }
            if (std::find(used.begin(), used.end(), it->second) != used.end()) {
                throw Error(ErrorCode::InvalidCircuit, where + ": eta is not injective");
            }
            used.push_back(it->second);
        }
    }
    for (const auto &[key, slot] : eta) {
        const auto &succ = tree.successors(key.first);
        if (std::find(succ.begin(), succ.end(), key.second) == succ.end()) {
            throw Error(ErrorCode::InvalidCircuit,
                        "eta(" + std::to_string(key.first) + ", " + std::to_string(key.second) + ") is not a tree edge");
        }
    }
}

struct QubitLocation {
    NodeId node;
    int slot;
    friend bool operator==(const QubitLocation &, const QubitLocation &) = default;
};

struct DenseDistribution {
    DensityMatrix state;
    std::vector<QubitLocation> final_qubits;  // final qubit i lives here
    std::vector<int> edge_uses;
};

/**
 * Tree state distribution on the dense engine.
 *
 * Levels are processed in height order; each node runs its circuit and sends
 * the qubit in slot eta(v, u) across edge (v, u), where that edge's channel
 * acts on it. Returned qubits are ordered root first, then by ascending node
 * id, then by slot.
 */
inline DenseDistribution distribute_dense(const RootedTree &tree, const CircuitSpec &circuit, const IndexMap &eta,
                                          const std::vector<ChannelModel> &channels) {
    validate_circuit(tree, circuit, eta);
    if (static_cast<int>(channels.size()) != tree.edge_count()) {
        throw Error(ErrorCode::InvalidParameter, "one channel per edge required");
    }

    // Plan: assign an id to every qubit and find where it ends up.
    const auto n_nodes = static_cast<std::size_t>(tree.node_count());
    std::vector<std::vector<int>> reg(n_nodes);
    std::vector<std::vector<bool>> sent(n_nodes);
    std::vector<int> incoming(n_nodes, -1);
    int next_id = 0;
    for (int k = 0; k <= tree.max_height(); ++k) {
        for (NodeId v : tree.level(k)) {
            const auto vi = static_cast<std::size_t>(v);
            const int q = circuit.nodes[vi].qubits;
            reg[vi].assign(static_cast<std::size_t>(q), -1);
            sent[vi].assign(static_cast<std::size_t>(q), false);
            for (int s = 0; s < q; ++s) {
                const bool received = v != tree.root() && s == 0;
                reg[vi][static_cast<std::size_t>(s)] = received ? incoming[vi] : next_id++;
            }
            for (NodeId u : tree.successors(v)) {
                const int slot = eta.at({v, u});
                incoming[static_cast<std::size_t>(u)] = reg[vi][static_cast<std::size_t>(slot)];
                sent[vi][static_cast<std::size_t>(slot)] = true;
            }
        }
    }
    std::vector<NodeId> order{tree.root()};
    for (NodeId v = 0; v < tree.node_count(); ++v) {
        if (v != tree.root()) order.push_back(v);
    }
    std::vector<int> global(static_cast<std::size_t>(next_id), -1);
    std::vector<QubitLocation> final_qubits;
    for (NodeId v : order) {
        const auto vi = static_cast<std::size_t>(v);
        for (std::size_t s = 0; s < reg[vi].size(); ++s) {
            if (!sent[vi][s]) {
                global[static_cast<std::size_t>(reg[vi][s])] = static_cast<int>(final_qubits.size());
                final_qubits.push_back({v, static_cast<int>(s)});
            }
        }
    }

    DensityMatrix state(next_id);
    std::vector<int> edge_uses(channels.size(), 0);
    for (int k = 0; k <= tree.max_height(); ++k) {
        for (NodeId v : tree.level(k)) {
            const auto vi = static_cast<std::size_t>(v);
            for (const auto &g : circuit.nodes[vi].gates) {
                Gate mapped{g.kind, {}};
                for (int s : g.slots) {
                    mapped.slots.push_back(global[static_cast<std::size_t>(reg[vi][static_cast<std::size_t>(s)])]);
                }
                state.apply(mapped);
            }
            for (NodeId u : tree.successors(v)) {
                const EdgeId e = tree.incoming_edge(u);
                const int q = global[static_cast<std::size_t>(reg[vi][static_cast<std::size_t>(eta.at({v, u}))])];
                state.apply_channel(channels[static_cast<std::size_t>(e)], q);
                ++edge_uses[static_cast<std::size_t>(e)];
            }
        }
    }
    return {std::move(state), std::move(final_qubits), std::move(edge_uses)};
}

// ---------------------------------------------------------------------------
// Star presets

enum class SchemePreset { ZBasis, GhzX, GhzY, GhzZ };

constexpr std::string_view to_string(SchemePreset p) {
    switch (p) {
        case SchemePreset::ZBasis: return "Z_BASIS_X_CHANNELS";
        case SchemePreset::GhzX: return "GHZ_X";
        case SchemePreset::GhzY: return "GHZ_Y";
        case SchemePreset::GhzZ: return "GHZ_Z";
    }
    return "?";
}

inline SchemePreset parse_preset(std::string_view name) {
    if (name == "Z_BASIS_X_CHANNELS" || name == "Z_BASIS") return SchemePreset::ZBasis;
    if (name == "GHZ_X") return SchemePreset::GhzX;
    if (name == "GHZ_Y") return SchemePreset::GhzY;
    if (name == "GHZ_Z") return SchemePreset::GhzZ;
    throw Error(ErrorCode::InvalidParameter, "unknown scheme '" + std::string(name) + "'");
}

constexpr bool is_ghz(SchemePreset p) { return p != SchemePreset::ZBasis; }
constexpr Basis basis_of(SchemePreset p) { return is_ghz(p) ? Basis::Ghz : Basis::Z; }
constexpr LabelKind label_kind_of(SchemePreset p) { return is_ghz(p) ? LabelKind::Ghz : LabelKind::Bits; }

/// Width of the final state for a star of size n.
constexpr int label_qubits(SchemePreset p, int n) { return is_ghz(p) ? n : n - 1; }

inline bool preset_accepts_axis(SchemePreset p, PauliAxis axis) {
    switch (p) {
        case SchemePreset::ZBasis: return axis == PauliAxis::X || axis == PauliAxis::Y;
        case SchemePreset::GhzX: return axis == PauliAxis::X;
        case SchemePreset::GhzY: return axis == PauliAxis::Y;
        case SchemePreset::GhzZ: return axis == PauliAxis::Z;
    }
    return false;
}

/// Channel axis a GHZ preset is built for; X for the Z-basis preset.
inline PauliAxis axis_of(SchemePreset p) {
    switch (p) {
        case SchemePreset::GhzX: return PauliAxis::X;
        case SchemePreset::GhzY: return PauliAxis::Y;
        case SchemePreset::GhzZ: return PauliAxis::Z;
        case SchemePreset::ZBasis: break;
    }
    return PauliAxis::X;
}

struct PresetCircuit {
    CircuitSpec circuit;
    IndexMap eta;
    Basis basis;
};

/**
 * Node circuits for the star presets.
 *
 * Z basis: root sends |0>, the center fans the received bit out with T_{n-1}.
 * GHZ_X / GHZ_Y: root prepares a Bell pair and applies XHX then Z to the qubit
 * it keeps; the center applies HZ to the received qubit and fans out.
 * GHZ_Z: plain Bell pair at the root, fan-out followed by H on every outgoing
 * qubit, and H at each receiving end-node.
 */
inline PresetCircuit build_preset(const StarTopology &star, SchemePreset preset) {
    const int n = star.size();
    const NodeId center = star.center();
    PresetCircuit out;
    out.basis = basis_of(preset);
    out.circuit.nodes.assign(static_cast<std::size_t>(n + 1), NodeCircuit{1, {}});

    std::vector<int> fan(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n - 1; ++j) fan[static_cast<std::size_t>(j)] = j;
    auto &root = out.circuit.nodes[0];
    auto &mid = out.circuit.nodes[static_cast<std::size_t>(center)];
    mid.qubits = n - 1;
    for (int j = 0; j < n - 1; ++j) {
        out.eta[{center, j + 1}] = j;
    }

    switch (preset) {
        case SchemePreset::ZBasis:
            root.qubits = 1;
            out.eta[{0, center}] = 0;
            mid.gates = {{GateKind::ToffoliN, fan}};
            break;
        case SchemePreset::GhzX:
        case SchemePreset::GhzY:
            root.qubits = 2;
            root.gates = {{GateKind::H, {0}}, {GateKind::CNOT, {0, 1}}, {GateKind::XHX, {0}}, {GateKind::Z, {0}}};
            out.eta[{0, center}] = 1;
            mid.gates = {{GateKind::HZ, {0}}, {GateKind::ToffoliN, fan}};
            break;
        case SchemePreset::GhzZ:
            root.qubits = 2;
            root.gates = {{GateKind::H, {0}}, {GateKind::CNOT, {0, 1}}};
            out.eta[{0, center}] = 1;
            mid.gates = {{GateKind::ToffoliN, fan}};
            for (int j = 0; j < n - 1; ++j) {
                mid.gates.push_back({GateKind::H, {j}});
            }
            for (int j = 1; j < n; ++j) {
                out.circuit.nodes[static_cast<std::size_t>(j)].gates = {{GateKind::H, {0}}};
            }
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Flip-propagation engine

/**
 * Per-edge effect of a channel error on the final outcome label.
 *
 * For every preset, an error on edge e is equivalent to a fixed Pauli on one
 * final qubit, so it acts on the label as an XOR mask.
 */
struct FlipFrame {
    SchemePreset preset;
    int n;  // channels
    LabelKind kind;
    int qubits;  // label width
    std::vector<LabelIndex> edge_masks;
};

inline FlipFrame make_flip_frame(SchemePreset preset, int n) {
    if (n < 2 || n > 20) {
        throw Error(ErrorCode::Capacity, "flip engine supports stars with 2..20 end-nodes");
    }
    FlipFrame f{preset, n, label_kind_of(preset), label_qubits(preset, n), {}};
    if (preset == SchemePreset::ZBasis) {
        const LabelIndex all = (LabelIndex{1} << (n - 1)) - 1;
        f.edge_masks.push_back(all);
        for (int j = 1; j < n; ++j) {
            f.edge_masks.push_back(LabelIndex{1} << (n - 1 - j));
        }
        return f;
    }
    const GhzLabel zero{n, 0, 0};
    auto mask = [&](PauliAxis axis, int qubit) { return ghz_pauli_action(zero, axis, qubit).label.packed(); };
    const bool y = preset == SchemePreset::GhzY;
    f.edge_masks.push_back(mask(y ? PauliAxis::Y : PauliAxis::Z, 0));
    for (int j = 1; j < n; ++j) {
        f.edge_masks.push_back(mask(y ? PauliAxis::Y : PauliAxis::X, j));
    }
    return f;
}

inline LabelIndex label_for_flips(const FlipFrame &frame, std::uint64_t flips) {
    LabelIndex label = 0;
    for (int e = 0; e < frame.n; ++e) {
        if ((flips >> e) & 1U) label ^= frame.edge_masks[static_cast<std::size_t>(e)];
    }
    return label;
}

inline void check_thetas(const std::vector<double> &theta, int n) {
    if (static_cast<int>(theta.size()) != n) {
        throw Error(ErrorCode::InvalidParameter,
                    "expected " + std::to_string(n) + " channel parameters, got " + std::to_string(theta.size()));
    }
    for (double t : theta) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw Error(ErrorCode::InvalidParameter, "theta outside [0,1]");
        }
    }
}

/// Exact outcome distribution: all 2^n flip patterns weighted by prod theta^(1-f)(1-theta)^f.
inline DiagonalState exact_distribution(const FlipFrame &frame, const std::vector<double> &theta) {
    check_thetas(theta, frame.n);
    DiagonalState out{frame.kind, frame.qubits, std::vector<double>(label_count(frame.qubits), 0.0)};
    const std::uint64_t patterns = std::uint64_t{1} << frame.n;
    for (std::uint64_t f = 0; f < patterns; ++f) {
        double w = 1.0;
        for (int e = 0; e < frame.n && w != 0.0; ++e) {
            const double t = theta[static_cast<std::size_t>(e)];
            w *= ((f >> e) & 1U) ? (1.0 - t) : t;
        }
        out.probabilities[static_cast<std::size_t>(label_for_flips(frame, f))] += w;
    }
    return out;
}

/// Per-shot Monte Carlo: draw each edge's flip, XOR the masks, histogram.
template <class Rng>
std::vector<std::uint64_t> sample_shots(const FlipFrame &frame, const std::vector<double> &theta, std::uint64_t shots,
                                        Rng &rng) {
    check_thetas(theta, frame.n);
    std::vector<SinglePauliChannel> channels;
    for (double t : theta) channels.push_back({PauliAxis::X, t});
    std::vector<std::uint64_t> counts(label_count(frame.qubits), 0);
    for (std::uint64_t i = 0; i < shots; ++i) {
        LabelIndex label = 0;
        for (int e = 0; e < frame.n; ++e) {
            if (sample_flip(channels[static_cast<std::size_t>(e)], rng)) {
                label ^= frame.edge_masks[static_cast<std::size_t>(e)];
            }
        }
        ++counts[static_cast<std::size_t>(label)];
    }
    return counts;
}

/// Shared Pauli axis of a network of channels. Identity channels match any axis.
inline std::optional<PauliAxis> common_axis(const std::vector<ChannelModel> &channels) {
    std::optional<PauliAxis> axis;
    for (std::size_t e = 0; e < channels.size(); ++e) {
        const auto &c = channels[e];
        if (c.identity_weight() >= 1.0 - kChannelTolerance) continue;
        const auto a = c.single_pauli_axis();
        if (!a) {
            throw Error(ErrorCode::UnsupportedModel, "channel " + std::to_string(e) + " is not a single-Pauli channel");
        }
        if (axis && *axis != *a) {
            throw Error(ErrorCode::UnsupportedModel, "mixed Pauli axes across channels are not supported");
        }
        axis = a;
    }
    return axis;
}

/// Identity probabilities per edge; rejects anything the flip engine cannot model for `preset`.
inline std::vector<double> flip_parameters(SchemePreset preset, const std::vector<ChannelModel> &channels) {
    const auto axis = common_axis(channels);
    if (axis && !preset_accepts_axis(preset, *axis)) {
        throw Error(ErrorCode::UnsupportedModel, std::string(to_string(preset)) + " does not support " +
                                                     std::string(to_string(*axis)) + " channels");
    }
    std::vector<double> theta;
    for (const auto &c : channels) theta.push_back(std::clamp(c.identity_weight(), 0.0, 1.0));
    return theta;
}

enum class Engine { Dense, Flip };

/// Final outcome distribution of a star preset on either engine.
inline DiagonalState distribute(const StarTopology &star, SchemePreset preset,
                                const std::vector<ChannelModel> &channels, Engine engine) {
    if (static_cast<int>(channels.size()) != star.size()) {
        throw Error(ErrorCode::InvalidParameter, "one channel per edge required");
    }
    if (engine == Engine::Flip) {
        return exact_distribution(make_flip_frame(preset, star.size()), flip_parameters(preset, channels));
    }
    const auto pc = build_preset(star, preset);
    const auto run = distribute_dense(star.tree(), pc.circuit, pc.eta, channels);
    return diagonalize_in_basis(run.state, pc.basis);
}

inline std::vector<ChannelModel> single_pauli_network(PauliAxis axis, const std::vector<double> &theta) {
    std::vector<ChannelModel> out;
    for (double t : theta) out.push_back(make_single_pauli(axis, t).model());
    return out;
}

} // namespace qntomo
