#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chaingraph/amount.hpp"
#include "chaingraph/script.hpp"

namespace chaingraph {

enum class NodeKind : std::uint8_t { Coinbase = 0, Script, Tx, Block };

inline constexpr std::size_t kNodeKindCount = 4;

inline constexpr std::array<const char*, kNodeKindCount> kNodeKindNames = {
    "Coinbase", "Script", "Tx", "Block"};

inline const char* node_kind_name(NodeKind k) {
    return kNodeKindNames[static_cast<std::size_t>(k)];
}

inline std::optional<NodeKind> node_kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNodeKindNames.size(); ++i) {
        if (name == kNodeKindNames[i]) return static_cast<NodeKind>(i);
    }
    return std::nullopt;
}

// Node identity: kind plus canonical ID string. The Coinbase node is the
// singleton "coinbase"; Script nodes key on the ScriptId canonical string;
// Tx nodes on txid; Block nodes on the decimal height.
struct NodeRef {
    NodeKind kind = NodeKind::Coinbase;
    std::string id;

    bool operator==(const NodeRef&) const = default;

    static NodeRef coinbase() { return {NodeKind::Coinbase, "coinbase"}; }
    static NodeRef script(const ScriptId& sid) { return {NodeKind::Script, sid.text}; }
    static NodeRef tx(std::string txid) { return {NodeKind::Tx, std::move(txid)}; }
    static NodeRef block(std::uint64_t height) { return {NodeKind::Block, std::to_string(height)}; }
};

enum class EdgeType : std::uint8_t { Mints = 0, Transfers, Fee, Redeems, Confirms, Credits };

inline constexpr std::size_t kEdgeTypeCount = 6;

inline constexpr std::array<const char*, kEdgeTypeCount> kEdgeTypeNames = {
    "Mints", "Transfers", "Fee", "Redeems", "Confirms", "Credits"};

inline const char* edge_type_name(EdgeType t) {
    return kEdgeTypeNames[static_cast<std::size_t>(t)];
}

inline std::optional<EdgeType> edge_type_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kEdgeTypeNames.size(); ++i) {
        if (name == kEdgeTypeNames[i]) return static_cast<EdgeType>(i);
    }
    return std::nullopt;
}

struct EdgeRecord {
    NodeRef src;
    NodeRef dst;
    EdgeType type = EdgeType::Transfers;
    Amount value = 0;
    std::uint64_t height = 0;

    bool operator==(const EdgeRecord&) const = default;
};

// The ten permitted (source kind, edge type, target kind) patterns.
inline bool check_pattern(NodeKind src, EdgeType type, NodeKind dst) {
    switch (type) {
        case EdgeType::Mints:
            return src == NodeKind::Coinbase && (dst == NodeKind::Script || dst == NodeKind::Tx);
        case EdgeType::Transfers:
        case EdgeType::Fee:
            return (src == NodeKind::Script && dst == NodeKind::Script) ||
                   (src == NodeKind::Tx && dst == NodeKind::Tx);
        case EdgeType::Redeems:
            return (src == NodeKind::Script || src == NodeKind::Tx) && dst == NodeKind::Block;
        case EdgeType::Confirms:
            return src == NodeKind::Block && dst == NodeKind::Tx;
        case EdgeType::Credits:
            return src == NodeKind::Block && dst == NodeKind::Script;
    }
    return false;
}

inline bool check_pattern(const EdgeRecord& e) {
    return check_pattern(e.src.kind, e.type, e.dst.kind);
}

// Typed node properties. A Tx node referenced by an input but confirmed in an
// earlier block is carried as a stub: identity only, properties unknown here.
struct ScriptNodeProps {
    ScriptType script_type = ScriptType::NonStandard;
};

struct TxNodeProps {
    std::uint64_t size_bytes = 0;
    std::uint64_t vsize = 0;
    std::uint64_t weight_units = 0;
    std::string version;
    std::uint64_t lock_time = 0;
    bool stub = false;
};

struct BlockNodeProps {
    std::uint64_t height = 0;
    std::int64_t median_time = 0;
    double difficulty = 0.0;
    std::uint64_t n_tx = 0;
    std::uint64_t size_bytes = 0;
    std::uint64_t stripped_size_bytes = 0;
    std::uint64_t weight_units = 0;
};

// One block rendered as a graph. Nodes form a set keyed by canonical ID;
// edges are a multiset, parallel edges preserved in emission order.
struct BlockGraph {
    std::uint64_t height = 0;

    bool has_coinbase_node = false;
    std::vector<std::pair<std::string, ScriptNodeProps>> script_nodes;
    std::vector<std::pair<std::string, TxNodeProps>> tx_nodes;
    BlockNodeProps block_node;
    std::vector<EdgeRecord> edges;

    // insertion order preserved in the vectors above; maps give set semantics
    std::unordered_map<std::string, std::size_t> script_index;
    std::unordered_map<std::string, std::size_t> tx_index;

    void add_coinbase_node() { has_coinbase_node = true; }

    void add_script_node(const std::string& id, ScriptNodeProps props) {
        if (script_index.emplace(id, script_nodes.size()).second) {
            script_nodes.emplace_back(id, props);
        }
    }

    void add_tx_node(const std::string& txid, TxNodeProps props) {
        auto [it, inserted] = tx_index.emplace(txid, tx_nodes.size());
        if (inserted) {
            tx_nodes.emplace_back(txid, std::move(props));
        } else if (!props.stub && tx_nodes[it->second].second.stub) {
            tx_nodes[it->second].second = std::move(props);
        }
    }

    void add_edge(EdgeRecord e) { edges.push_back(std::move(e)); }

    std::size_t node_count() const {
        return (has_coinbase_node ? 1 : 0) + script_nodes.size() + tx_nodes.size() + 1;
    }
};

}  // namespace chaingraph
