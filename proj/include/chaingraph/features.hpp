#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "chaingraph/sampler.hpp"
#include "chaingraph/tsv_io.hpp"

namespace chaingraph {

// Fixed-width integer feature vectors for a sampled subgraph.
//   node row: node-kind one-hot (Coinbase, Script, Tx, Block),
//             script-type one-hot (10 tags, all zero for non-Script),
//             in-degree and out-degree within the sample.
//   edge row: edge-type one-hot (Mints, Transfers, Fee, Redeems, Confirms,
//             Credits), value in satoshis, height.
inline constexpr std::size_t kNodeFeatureWidth = kNodeKindCount + kScriptTypeCount + 2;
inline constexpr std::size_t kEdgeFeatureWidth = kEdgeTypeCount + 2;

inline constexpr const char* kNodeFeatureSchema = "chaingraph-node-features v1";
inline constexpr const char* kEdgeFeatureSchema = "chaingraph-edge-features v1";

struct FeatureVectors {
    std::vector<std::vector<std::int64_t>> node_rows;
    std::vector<std::vector<std::int64_t>> edge_rows;
    SubgraphLabel label = SubgraphLabel::ConnectedGraph;
};

inline FeatureVectors encode_features(const Subgraph& s) {
    FeatureVectors out;
    out.label = s.label;

    std::unordered_map<std::uint32_t, std::pair<std::int64_t, std::int64_t>> degree;  // in, out
    for (std::uint32_t id : s.node_ids) degree[id];
    for (std::uint32_t eid : s.edge_ids) {
        ++degree[s.store->edge_src(eid)].second;
        ++degree[s.store->edge_dst(eid)].first;
    }

    out.node_rows.reserve(s.node_ids.size());
    for (std::uint32_t id : s.node_ids) {
        std::vector<std::int64_t> row(kNodeFeatureWidth, 0);
        const NodeRef& ref = s.store->node(id);
        row[static_cast<std::size_t>(ref.kind)] = 1;
        if (ref.kind == NodeKind::Script) {
            row[kNodeKindCount + static_cast<std::size_t>(s.store->script_type(id))] = 1;
        }
        row[kNodeKindCount + kScriptTypeCount] = degree[id].first;
        row[kNodeKindCount + kScriptTypeCount + 1] = degree[id].second;
        out.node_rows.push_back(std::move(row));
    }

    out.edge_rows.reserve(s.edge_ids.size());
    for (std::uint32_t eid : s.edge_ids) {
        const EdgeRecord& e = s.store->edge(eid);
        std::vector<std::int64_t> row(kEdgeFeatureWidth, 0);
        row[static_cast<std::size_t>(e.type)] = 1;
        row[kEdgeTypeCount] = e.value;
        row[kEdgeTypeCount + 1] = static_cast<std::int64_t>(e.height);
        out.edge_rows.push_back(std::move(row));
    }
    return out;
}

namespace detail {

inline void write_feature_matrix(const std::filesystem::path& path, const char* schema,
                                 const std::vector<std::vector<std::int64_t>>& rows) {
    FileWriter out(path, Compression::None);
    out.write("# ");
    out.write(schema);
    out.write("\n");
    std::string line;
    for (const auto& row : rows) {
        line.clear();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i != 0) line.push_back('\t');
            line += std::to_string(row[i]);
        }
        line.push_back('\n');
        out.write(line);
    }
    out.close(rows.size());
}

}  // namespace detail

// Three files per subgraph: node vectors, edge vectors, and the graph-level
// label. The caller appends the (id, label) pair to the dataset labels file.
inline void write_subgraph_files(const FeatureVectors& f, const std::filesystem::path& dir,
                                 const std::string& sample_id) {
    std::filesystem::create_directories(dir);
    detail::write_feature_matrix(dir / (sample_id + ".nodes.tsv"), kNodeFeatureSchema, f.node_rows);
    detail::write_feature_matrix(dir / (sample_id + ".edges.tsv"), kEdgeFeatureSchema, f.edge_rows);
    FileWriter label(dir / (sample_id + ".label.txt"), Compression::None);
    label.write(subgraph_label_name(f.label));
    label.write("\n");
    label.close(1);
}

}  // namespace chaingraph
