#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "chaingraph/dedup.hpp"
#include "chaingraph/errors.hpp"
#include "chaingraph/graph.hpp"
#include "chaingraph/serialize.hpp"
#include "chaingraph/util.hpp"

namespace chaingraph {

// In-memory adjacency over a serialized graph, read-only during sampling.
// Nodes are indexed densely; edges keep their full records so samples carry
// values and heights through to feature encoding.
class GraphStore {
public:
    struct StoredNode {
        NodeRef ref;
    };

    std::uint32_t add_node(const NodeRef& ref) {
        auto key = node_key(ref);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({ref});
        script_type_.push_back(ScriptType::NonStandard);
        index_.emplace(std::move(key), id);
        out_.emplace_back();
        in_.emplace_back();
        return id;
    }

    void set_script_type(std::uint32_t id, ScriptType t) { script_type_[id] = t; }
    ScriptType script_type(std::uint32_t id) const { return script_type_[id]; }

    void add_edge(const EdgeRecord& e) {
        std::uint32_t src = add_node(e.src);
        std::uint32_t dst = add_node(e.dst);
        std::uint32_t eid = static_cast<std::uint32_t>(edges_.size());
        edges_.push_back(e);
        edge_src_.push_back(src);
        edge_dst_.push_back(dst);
        out_[src].push_back(eid);
        in_[dst].push_back(eid);
    }

    std::optional<std::uint32_t> find(const NodeRef& ref) const {
        auto it = index_.find(node_key(ref));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const NodeRef& node(std::uint32_t id) const { return nodes_[id].ref; }
    const EdgeRecord& edge(std::uint32_t eid) const { return edges_[eid]; }
    std::uint32_t edge_src(std::uint32_t eid) const { return edge_src_[eid]; }
    std::uint32_t edge_dst(std::uint32_t eid) const { return edge_dst_[eid]; }
    const std::vector<std::uint32_t>& out_edges(std::uint32_t id) const { return out_[id]; }
    const std::vector<std::uint32_t>& in_edges(std::uint32_t id) const { return in_[id]; }

    // Loads every batch of a serialized layout.
    static GraphStore from_manifest(const std::filesystem::path& dir, const Manifest& manifest) {
        GraphStore store;
        BatchReader reader(dir, manifest);
        while (auto batch = reader.next()) {
            for (const NodeRow& n : batch->nodes) {
                std::uint32_t id = store.add_node(n.ref);
                if (n.ref.kind == NodeKind::Script && n.cells.size() >= 3) {
                    if (auto t = script_type_from_name(n.cells[2])) store.set_script_type(id, *t);
                }
            }
            for (const EdgeRecord& e : batch->edges) store.add_edge(e);
        }
        return store;
    }

    // Loads a plain edge-list TSV: kind-prefixed endpoint IDs
    // ("script:<id>", "tx:<txid>", "block:<height>", "coinbase"), then edge
    // type, value in satoshis, and height. Lines starting with '#' are
    // comments.
    static GraphStore from_edge_list(const std::filesystem::path& file) {
        GraphStore store;
        Compression comp = file.extension() == ".gz" ? Compression::Gzip : Compression::None;
        LineReader reader(file, comp);
        std::uint64_t line_no = 0;
        while (auto line = reader.next_line()) {
            ++line_no;
            if (line->empty() || (*line)[0] == '#') continue;
            auto cells = split_view(*line, '\t');
            if (cells.size() != 5) {
                throw ParseError("edge list " + file.string() + " line " + std::to_string(line_no) +
                                 ": expected 5 tab-separated fields");
            }
            auto type = edge_type_from_name(cells[2]);
            if (!type) {
                throw ParseError("edge list line " + std::to_string(line_no) + ": unknown edge type '" +
                                 std::string(cells[2]) + "'");
            }
            EdgeRecord e;
            e.src = parse_prefixed_ref(cells[0], line_no);
            e.dst = parse_prefixed_ref(cells[1], line_no);
            e.type = *type;
            e.value = std::stoll(std::string(cells[3]));
            e.height = std::stoull(std::string(cells[4]));
            store.add_edge(e);
        }
        return store;
    }

    static NodeRef parse_prefixed_ref(std::string_view token, std::uint64_t line_no) {
        if (token == "coinbase") return NodeRef::coinbase();
        auto pos = token.find(':');
        if (pos == std::string_view::npos) {
            throw ParseError("edge list line " + std::to_string(line_no) +
                             ": endpoint '" + std::string(token) + "' lacks a kind prefix");
        }
        std::string_view kind = token.substr(0, pos);
        std::string id(token.substr(pos + 1));
        if (kind == "script") return NodeRef{NodeKind::Script, std::move(id)};
        if (kind == "tx") return NodeRef{NodeKind::Tx, std::move(id)};
        if (kind == "block") return NodeRef{NodeKind::Block, std::move(id)};
        throw ParseError("edge list line " + std::to_string(line_no) + ": unknown node kind '" +
                         std::string(kind) + "'");
    }

private:
    static std::string node_key(const NodeRef& ref) {
        return std::string(1, static_cast<char>('0' + static_cast<int>(ref.kind))) + ref.id;
    }

    std::vector<StoredNode> nodes_;
    std::vector<ScriptType> script_type_;
    std::vector<EdgeRecord> edges_;
    std::vector<std::uint32_t> edge_src_;
    std::vector<std::uint32_t> edge_dst_;
    std::vector<std::vector<std::uint32_t>> out_;
    std::vector<std::vector<std::uint32_t>> in_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace chaingraph
