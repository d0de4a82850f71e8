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
#include <cstddef>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "qntomo/error.hpp"

namespace qntomo {

using NodeId = int;
using EdgeId = int;

struct Edge {
    NodeId a;
    NodeId b;
};

/**
 * Rooted tree over dense node ids 0..node_count-1.
 *
 * Edge i carries channel i. Heights, predecessors and ordered successor lists
 * are computed once at construction; the object is immutable afterwards.
 */
class RootedTree {
  public:
    static RootedTree build(int node_count, std::vector<Edge> edges, NodeId root,
                            std::vector<NodeId> end_nodes) {
        RootedTree t;
        if (node_count < 2) {
            throw Error(ErrorCode::InvalidTopology, "a tree needs at least two nodes");
        }
        if (static_cast<int>(edges.size()) != node_count - 1) {
            throw Error(ErrorCode::InvalidTopology,
                        "expected " + std::to_string(node_count - 1) + " edges, got " +
                            std::to_string(edges.size()));
        }
        if (root < 0 || root >= node_count) {
            throw Error(ErrorCode::InvalidTopology, "root out of range");
        }
        t.node_count_ = node_count;
        t.root_ = root;
        t.edges_ = std::move(edges);
        t.is_end_.assign(static_cast<std::size_t>(node_count), false);
        for (NodeId v : end_nodes) {
            if (v < 0 || v >= node_count) {
                throw Error(ErrorCode::InvalidTopology, "end node " + std::to_string(v) + " out of range");
            }
            if (t.is_end_[static_cast<std::size_t>(v)]) {
                throw Error(ErrorCode::InvalidTopology, "duplicate end node " + std::to_string(v));
            }
            t.is_end_[static_cast<std::size_t>(v)] = true;
        }

        std::vector<std::vector<std::pair<NodeId, EdgeId>>> adj(static_cast<std::size_t>(node_count));
        for (EdgeId e = 0; e < static_cast<EdgeId>(t.edges_.size()); ++e) {
            const auto [a, b] = t.edges_[static_cast<std::size_t>(e)];
            if (a < 0 || a >= node_count || b < 0 || b >= node_count || a == b) {
                throw Error(ErrorCode::InvalidTopology, "bad edge " + std::to_string(e));
            }
            adj[static_cast<std::size_t>(a)].emplace_back(b, e);
            adj[static_cast<std::size_t>(b)].emplace_back(a, e);
        }

        const auto n = static_cast<std::size_t>(node_count);
        t.height_.assign(n, -1);
        t.parent_.assign(n, -1);
        t.parent_edge_.assign(n, -1);
        t.successors_.assign(n, {});
        std::queue<NodeId> frontier;
        frontier.push(root);
        t.height_[static_cast<std::size_t>(root)] = 0;
        while (!frontier.empty()) {
            const NodeId v = frontier.front();
            frontier.pop();
            for (const auto &[u, e] : adj[static_cast<std::size_t>(v)]) {
                auto &hu = t.height_[static_cast<std::size_t>(u)];
                if (hu >= 0) {
                    if (u != t.parent_[static_cast<std::size_t>(v)]) {
                        throw Error(ErrorCode::InvalidTopology, "graph contains a cycle");
                    }
                    continue;
                }
                hu = t.height_[static_cast<std::size_t>(v)] + 1;
                t.parent_[static_cast<std::size_t>(u)] = v;
                t.parent_edge_[static_cast<std::size_t>(u)] = e;
                frontier.push(u);
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (t.height_[v] < 0) {
                throw Error(ErrorCode::InvalidTopology, "node " + std::to_string(v) + " unreachable from root");
            }
        }
        t.h_max_ = *std::max_element(t.height_.begin(), t.height_.end());
        for (std::size_t v = 0; v < n; ++v) {
            if (t.parent_[v] >= 0) {
                t.successors_[static_cast<std::size_t>(t.parent_[v])].push_back(static_cast<NodeId>(v));
            }
        }
        // Successors are filled in ascending label order already; leaves at h_max have none.
        t.levels_.assign(static_cast<std::size_t>(t.h_max_ + 1), {});
        for (std::size_t v = 0; v < n; ++v) {
            t.levels_[static_cast<std::size_t>(t.height_[v])].push_back(static_cast<NodeId>(v));
        }
        return t;
    }

    [[nodiscard]] int node_count() const noexcept { return node_count_; }
    [[nodiscard]] NodeId root() const noexcept { return root_; }
    [[nodiscard]] const std::vector<Edge> &edges() const noexcept { return edges_; }
    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges_.size()); }

    [[nodiscard]] bool is_end_node(NodeId v) const { return is_end_[checked(v)]; }
    [[nodiscard]] std::vector<NodeId> end_nodes() const { return select(true); }
    [[nodiscard]] std::vector<NodeId> intermediate_nodes() const { return select(false); }

    [[nodiscard]] int height(NodeId v) const { return height_[checked(v)]; }
    [[nodiscard]] const std::vector<int> &heights() const noexcept { return height_; }
    [[nodiscard]] int max_height() const noexcept { return h_max_; }
    /// H(k): nodes at height k, ascending.
    [[nodiscard]] const std::vector<NodeId> &level(int k) const { return levels_.at(static_cast<std::size_t>(k)); }
    /// Leaves: nodes at height h_max.
    [[nodiscard]] const std::vector<NodeId> &leaves() const { return levels_.back(); }

    [[nodiscard]] NodeId predecessor(NodeId v) const {
        const auto p = parent_[checked(v)];
        if (p < 0) {
            throw Error(ErrorCode::NoPredecessor, "root has no predecessor");
        }
        return p;
    }

    /// Edge id connecting v to its predecessor; the channel a qubit crosses to reach v.
    [[nodiscard]] EdgeId incoming_edge(NodeId v) const {
        const auto e = parent_edge_[checked(v)];
        if (e < 0) {
            throw Error(ErrorCode::NoPredecessor, "root has no incoming edge");
        }
        return e;
    }

    [[nodiscard]] const std::vector<NodeId> &successors(NodeId v) const { return successors_[checked(v)]; }

    /// Non-root end nodes whose height is below h_max; they are not leaves.
    [[nodiscard]] std::vector<NodeId> shallow_end_nodes() const {
        std::vector<NodeId> out;
        for (NodeId v = 0; v < node_count_; ++v) {
            if (v != root_ && is_end_[static_cast<std::size_t>(v)] && height_[static_cast<std::size_t>(v)] != h_max_) {
                out.push_back(v);
            }
        }
        return out;
    }

  private:
    RootedTree() = default;

    [[nodiscard]] std::size_t checked(NodeId v) const {
        if (v < 0 || v >= node_count_) {
            throw Error(ErrorCode::InvalidTopology, "node " + std::to_string(v) + " out of range");
        }
        return static_cast<std::size_t>(v);
    }

    [[nodiscard]] std::vector<NodeId> select(bool end) const {
        std::vector<NodeId> out;
        for (NodeId v = 0; v < node_count_; ++v) {
            if (is_end_[static_cast<std::size_t>(v)] == end) {
                out.push_back(v);
            }
        }
        return out;
    }

    int node_count_ = 0;
    NodeId root_ = 0;
    std::vector<Edge> edges_;
    std::vector<bool> is_end_;
    std::vector<int> height_;
    std::vector<NodeId> parent_;
    std::vector<EdgeId> parent_edge_;
    std::vector<std::vector<NodeId>> successors_;
    std::vector<std::vector<NodeId>> levels_;
    int h_max_ = 0;
};

/// Star with end-nodes 0..n-1 around intermediate node n, rooted at end-node 0.
/// Channel j is the edge (j, n).
class StarTopology {
  public:
    explicit StarTopology(int n) : n_(n), tree_(make_tree(n)) {}

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] NodeId center() const noexcept { return n_; }
    [[nodiscard]] const RootedTree &tree() const noexcept { return tree_; }

  private:
    static RootedTree make_tree(int n) {
        if (n < 2) {
            throw Error(ErrorCode::InvalidTopology, "a star needs at least two end-nodes");
        }
        std::vector<Edge> edges;
        std::vector<NodeId> ends;
        for (int j = 0; j < n; ++j) {
            edges.push_back({j, n});
            ends.push_back(j);
        }
        return RootedTree::build(n + 1, std::move(edges), 0, std::move(ends));
    }

    int n_;
    RootedTree tree_;
};

inline StarTopology build_star(int n) { return StarTopology(n); }

/// Recognizes the canonical star labeling; returns n when `tree` is one.
inline std::optional<int> star_size(const RootedTree &tree) {
    const int n = tree.node_count() - 1;
    if (n < 2 || tree.root() != 0) {
        return std::nullopt;
    }
    for (int j = 0; j < n; ++j) {
        const auto e = tree.edges()[static_cast<std::size_t>(j)];
        const bool ok = (e.a == j && e.b == n) || (e.a == n && e.b == j);
        if (!ok || !tree.is_end_node(j)) {
            return std::nullopt;
        }
    }
    if (tree.is_end_node(n)) {
        return std::nullopt;
    }
    return n;
}

} // namespace qntomo
