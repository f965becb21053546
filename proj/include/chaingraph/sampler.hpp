#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "chaingraph/errors.hpp"
#include "chaingraph/graph.hpp"
#include "chaingraph/graph_store.hpp"
#include "chaingraph/rng.hpp"

namespace chaingraph {

enum class SampleMethod : std::uint8_t { Bfs = 0, Dfs, ForestFire };

inline const char* sample_method_name(SampleMethod m) {
    switch (m) {
        case SampleMethod::Bfs: return "bfs";
        case SampleMethod::Dfs: return "dfs";
        case SampleMethod::ForestFire: return "forest_fire";
    }
    return "?";
}

inline std::optional<SampleMethod> sample_method_from_name(std::string_view name) {
    if (name == "bfs") return SampleMethod::Bfs;
    if (name == "dfs") return SampleMethod::Dfs;
    if (name == "forest_fire") return SampleMethod::ForestFire;
    return std::nullopt;
}

enum class TraversalDirection : std::uint8_t { Both = 0, Out, In };

struct SamplerConfig {
    std::uint32_t h_max = 2;       // receptive field depth
    std::uint32_t n = 10;          // neighbors sampled from the root at hop 0
    std::int64_t delta = 0;        // per-hop budget is max(n - h*delta, 0)

    std::vector<NodeKind> node_whitelist;  // empty = all kinds allowed
    std::vector<NodeKind> node_blacklist;
    std::vector<EdgeType> edge_whitelist;
    std::vector<EdgeType> edge_blacklist;
    // Sampled but not expanded further.
    std::vector<NodeKind> stop_on_nodes;
    std::vector<EdgeType> stop_on_edges;

    std::uint64_t min_nodes = 0;
    std::uint64_t max_nodes = UINT64_MAX;
    std::uint64_t min_edges = 0;
    std::uint64_t max_edges = UINT64_MAX;

    std::uint64_t rng_seed = 0;
    TraversalDirection direction = TraversalDirection::Both;

    std::uint64_t hop_budget(std::uint64_t h) const {
        std::int64_t b = static_cast<std::int64_t>(n) - static_cast<std::int64_t>(h) * delta;
        return b <= 0 ? 0 : static_cast<std::uint64_t>(b);
    }

    bool node_allowed(NodeKind k) const {
        if (!node_whitelist.empty() &&
            std::find(node_whitelist.begin(), node_whitelist.end(), k) == node_whitelist.end()) {
            return false;
        }
        return std::find(node_blacklist.begin(), node_blacklist.end(), k) == node_blacklist.end();
    }
    bool edge_allowed(EdgeType t) const {
        if (!edge_whitelist.empty() &&
            std::find(edge_whitelist.begin(), edge_whitelist.end(), t) == edge_whitelist.end()) {
            return false;
        }
        return std::find(edge_blacklist.begin(), edge_blacklist.end(), t) == edge_blacklist.end();
    }
    bool stops_expansion(NodeKind k) const {
        return std::find(stop_on_nodes.begin(), stop_on_nodes.end(), k) != stop_on_nodes.end();
    }
    bool stops_expansion(EdgeType t) const {
        return std::find(stop_on_edges.begin(), stop_on_edges.end(), t) != stop_on_edges.end();
    }
};

enum class SubgraphLabel : std::uint8_t { ConnectedGraph = 0, Forest };

inline const char* subgraph_label_name(SubgraphLabel l) {
    return l == SubgraphLabel::ConnectedGraph ? "ConnectedGraph" : "Forest";
}

struct Subgraph {
    const GraphStore* store = nullptr;
    std::uint32_t root = 0;
    std::vector<std::uint32_t> node_ids;  // insertion order, root first
    std::vector<std::uint32_t> edge_ids;
    SubgraphLabel label = SubgraphLabel::ConnectedGraph;
    // One entry per forest-fire expansion call: (hop, nodes drawn). Used by
    // budget-bound checks.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> draw_log;
};

// ConnectedGraph iff the undirected view of the sample is weakly connected.
// A single node with no edges is vacuously connected.
inline SubgraphLabel label_connectivity(const Subgraph& s) {
    if (s.node_ids.size() <= 1) return SubgraphLabel::ConnectedGraph;
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> adj;
    adj.reserve(s.node_ids.size());
    for (std::uint32_t id : s.node_ids) adj[id];
    for (std::uint32_t eid : s.edge_ids) {
        std::uint32_t a = s.store->edge_src(eid);
        std::uint32_t b = s.store->edge_dst(eid);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<std::uint32_t> queue{s.node_ids.front()};
    std::unordered_set<std::uint32_t> seen{s.node_ids.front()};
    while (!queue.empty()) {
        std::uint32_t v = queue.back();
        queue.pop_back();
        for (std::uint32_t w : adj[v]) {
            if (seen.insert(w).second) queue.push_back(w);
        }
    }
    return seen.size() == s.node_ids.size() ? SubgraphLabel::ConnectedGraph
                                            : SubgraphLabel::Forest;
}

// Rejection reason when the sample misses the configured size floor; rejected
// samples are reported, never padded.
inline std::optional<std::string> size_violation(const SamplerConfig& cfg, const Subgraph& s) {
    if (s.node_ids.size() < cfg.min_nodes) {
        return "sample has " + std::to_string(s.node_ids.size()) + " nodes, below min_nodes " +
               std::to_string(cfg.min_nodes);
    }
    if (s.edge_ids.size() < cfg.min_edges) {
        return "sample has " + std::to_string(s.edge_ids.size()) + " edges, below min_edges " +
               std::to_string(cfg.min_edges);
    }
    return std::nullopt;
}

namespace detail {

struct IncidentEdge {
    std::uint32_t edge_id;
    std::uint32_t neighbor;
};

// Incident edges of v in store order (out list, then in list for Both),
// filtered by edge type, direction, and the neighbor's node kind.
inline std::vector<IncidentEdge> incident_edges(const GraphStore& store, std::uint32_t v,
                                                const SamplerConfig& cfg) {
    std::vector<IncidentEdge> out;
    auto consider = [&](std::uint32_t eid, std::uint32_t neighbor) {
        const EdgeRecord& e = store.edge(eid);
        if (!cfg.edge_allowed(e.type)) return;
        if (!cfg.node_allowed(store.node(neighbor).kind)) return;
        out.push_back({eid, neighbor});
    };
    if (cfg.direction != TraversalDirection::In) {
        for (std::uint32_t eid : store.out_edges(v)) consider(eid, store.edge_dst(eid));
    }
    if (cfg.direction != TraversalDirection::Out) {
        for (std::uint32_t eid : store.in_edges(v)) consider(eid, store.edge_src(eid));
    }
    return out;
}

inline std::uint32_t require_root(const GraphStore& store, const NodeRef& root,
                                  const SamplerConfig& cfg) {
    auto id = store.find(root);
    if (!id) throw NotFoundError("root node " + root.id + " not present in store");
    if (!cfg.node_allowed(store.node(*id).kind)) {
        throw InvariantError("root node kind is excluded by the node filter");
    }
    return *id;
}

}  // namespace detail

// Breadth-first expansion honoring filters, hop limit, and size caps. The
// edge that first reaches a node is the one sampled; deterministic given the
// store ordering.
inline Subgraph sample_bfs(const GraphStore& store, const NodeRef& root, const SamplerConfig& cfg) {
    Subgraph s;
    s.store = &store;
    s.root = detail::require_root(store, root, cfg);
    s.node_ids.push_back(s.root);

    std::unordered_set<std::uint32_t> visited{s.root};
    std::deque<std::pair<std::uint32_t, std::uint32_t>> queue;  // (node, hop)
    queue.push_back({s.root, 0});  // stop-on rules apply to encountered nodes, not the root

    while (!queue.empty() && s.node_ids.size() < cfg.max_nodes &&
           s.edge_ids.size() < cfg.max_edges) {
        auto [v, hop] = queue.front();
        queue.pop_front();
        if (hop >= cfg.h_max) continue;
        for (const auto& inc : detail::incident_edges(store, v, cfg)) {
            if (visited.count(inc.neighbor)) continue;
            if (s.node_ids.size() >= cfg.max_nodes || s.edge_ids.size() >= cfg.max_edges) break;
            visited.insert(inc.neighbor);
            s.node_ids.push_back(inc.neighbor);
            s.edge_ids.push_back(inc.edge_id);
            const EdgeRecord& e = store.edge(inc.edge_id);
            bool stop = cfg.stops_expansion(store.node(inc.neighbor).kind) ||
                        cfg.stops_expansion(e.type);
            if (!stop) queue.push_back({inc.neighbor, hop + 1});
        }
    }
    s.label = label_connectivity(s);
    return s;
}

// Depth-first variant: recursion bites into the first admissible neighbor,
// backtracking in store order.
inline Subgraph sample_dfs(const GraphStore& store, const NodeRef& root, const SamplerConfig& cfg) {
    Subgraph s;
    s.store = &store;
    s.root = detail::require_root(store, root, cfg);
    s.node_ids.push_back(s.root);

    std::unordered_set<std::uint32_t> visited{s.root};
    // (node, hop, incident list, next index)
    struct Frame {
        std::uint32_t node;
        std::uint32_t hop;
        std::vector<detail::IncidentEdge> incident;
        std::size_t next = 0;
    };
    std::vector<Frame> stack;
    stack.push_back({s.root, 0, detail::incident_edges(store, s.root, cfg)});
    while (!stack.empty() && s.node_ids.size() < cfg.max_nodes &&
           s.edge_ids.size() < cfg.max_edges) {
        Frame& f = stack.back();
        if (f.hop >= cfg.h_max || f.next >= f.incident.size()) {
            stack.pop_back();
            continue;
        }
        const auto inc = f.incident[f.next++];
        if (visited.count(inc.neighbor)) continue;
        visited.insert(inc.neighbor);
        s.node_ids.push_back(inc.neighbor);
        s.edge_ids.push_back(inc.edge_id);
        const EdgeRecord& e = store.edge(inc.edge_id);
        bool stop = cfg.stops_expansion(store.node(inc.neighbor).kind) ||
                    cfg.stops_expansion(e.type);
        if (!stop && f.hop + 1 < cfg.h_max) {
            stack.push_back({inc.neighbor, f.hop + 1, detail::incident_edges(store, inc.neighbor, cfg)});
        }
    }
    s.label = label_connectivity(s);
    return s;
}

namespace detail {

struct ForestFireState {
    const GraphStore& store;
    const SamplerConfig& cfg;
    Subgraph& s;
    std::unordered_set<std::uint32_t> visited_nodes;
    std::unordered_set<std::uint32_t> visited_edges;
    CounterRng rng;

    void traverse_hop(std::uint32_t v, std::uint64_t hop) {
        if (cfg.stops_expansion(store.node(v).kind) && v != s.root) return;
        auto incident = incident_edges(store, v, cfg);

        // Not-yet-visited neighbors, in discovery order.
        std::vector<std::uint32_t> candidates;
        std::unordered_set<std::uint32_t> seen;
        for (const auto& inc : incident) {
            if (visited_nodes.count(inc.neighbor)) continue;
            if (seen.insert(inc.neighbor).second) candidates.push_back(inc.neighbor);
        }

        std::uint64_t budget = cfg.hop_budget(hop);
        std::uint64_t room = visited_nodes.size() >= cfg.max_nodes
                                 ? 0
                                 : cfg.max_nodes - visited_nodes.size();
        std::uint64_t draw = std::min<std::uint64_t>({budget, room, candidates.size()});

        std::unordered_set<std::uint32_t> drawn;
        for (std::size_t idx : sample_indices(candidates.size(), static_cast<std::size_t>(draw), rng)) {
            std::uint32_t node = candidates[idx];
            drawn.insert(node);
            visited_nodes.insert(node);
            s.node_ids.push_back(node);
        }
        s.draw_log.emplace_back(hop, drawn.size());

        // Keep new edges whose target landed in the draw; those targets carry
        // the fire one hop further.
        std::vector<std::uint32_t> ignited;
        std::unordered_set<std::uint32_t> ignited_set;
        for (const auto& inc : incident) {
            if (visited_edges.count(inc.edge_id)) continue;
            std::uint32_t target = store.edge_dst(inc.edge_id);
            if (!drawn.count(target)) continue;
            if (s.edge_ids.size() >= cfg.max_edges) break;
            visited_edges.insert(inc.edge_id);
            s.edge_ids.push_back(inc.edge_id);
            bool stop = cfg.stops_expansion(store.edge(inc.edge_id).type);
            if (!stop && ignited_set.insert(target).second) ignited.push_back(target);
        }

        if (hop < cfg.h_max) {
            for (std::uint32_t node : ignited) traverse_hop(node, hop + 1);
        }
    }
};

}  // namespace detail

// Forest-fire neighborhood sampling: from the not-yet-visited neighbor set at
// hop h, uniformly draw up to n - h*delta nodes, keep the edges whose target
// landed in the draw, and recurse on those targets while h < h_max. Global
// visited sets prevent re-sampling. An in-edge's target is the current node
// itself, never in the draw, so such neighbors can stay edge-less; the label
// step classifies those samples as forests.
inline Subgraph sample_forest_fire(const GraphStore& store, const NodeRef& root,
                                   const SamplerConfig& cfg) {
    Subgraph s;
    s.store = &store;
    s.root = detail::require_root(store, root, cfg);
    if (cfg.n < 1) throw InvariantError("forest fire requires n >= 1");
    s.node_ids.push_back(s.root);

    detail::ForestFireState state{store, cfg, s, {s.root}, {}, CounterRng(cfg.rng_seed)};
    state.traverse_hop(s.root, 0);
    s.label = label_connectivity(s);
    return s;
}

inline Subgraph sample(const GraphStore& store, const NodeRef& root, const SamplerConfig& cfg,
                       SampleMethod method) {
    switch (method) {
        case SampleMethod::Bfs: return sample_bfs(store, root, cfg);
        case SampleMethod::Dfs: return sample_dfs(store, root, cfg);
        case SampleMethod::ForestFire: return sample_forest_fire(store, root, cfg);
    }
    throw Error("unknown sampling method");
}

}  // namespace chaingraph
