#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "chaingraph/graph.hpp"
#include "chaingraph/manifest.hpp"
#include "chaingraph/serialize.hpp"

namespace chaingraph {

// Shannon entropy over the frequency distribution of distinct degree values:
// p_i is the fraction of nodes holding the i-th distinct value, M the number
// of distinct values, H_max = ln(M), H_n = H / H_max.
struct EntropySummary {
    std::uint64_t distinct_values = 0;  // M
    double raw_entropy = 0.0;           // H
    double max_entropy = 0.0;           // H_max
    double normalized = 0.0;            // H_n, zero when M <= 1
};

inline EntropySummary entropy_summary(const std::vector<std::uint64_t>& degrees) {
    EntropySummary e;
    if (degrees.empty()) return e;
    std::map<std::uint64_t, std::uint64_t> freq;
    for (auto d : degrees) ++freq[d];
    e.distinct_values = freq.size();
    double n = static_cast<double>(degrees.size());
    for (const auto& [value, count] : freq) {
        double p = static_cast<double>(count) / n;
        e.raw_entropy -= p * std::log(p);
    }
    e.max_entropy = std::log(static_cast<double>(e.distinct_values));
    e.normalized = e.distinct_values > 1 ? e.raw_entropy / e.max_entropy : 0.0;
    return e;
}

// Alternative reading for comparison: probabilities proportional to each
// node's degree share, p_v = d_v / sum(d); H_max = ln(#nodes with d > 0).
inline EntropySummary entropy_per_node_weights(const std::vector<std::uint64_t>& degrees) {
    EntropySummary e;
    long double total = 0;
    std::uint64_t carriers = 0;
    for (auto d : degrees) {
        total += d;
        if (d > 0) ++carriers;
    }
    e.distinct_values = carriers;
    if (carriers == 0 || total == 0) return e;
    long double h = 0;
    for (auto d : degrees) {
        if (d == 0) continue;
        long double p = static_cast<long double>(d) / total;
        h -= p * std::log(p);
    }
    e.raw_entropy = static_cast<double>(h);
    e.max_entropy = std::log(static_cast<double>(carriers));
    e.normalized = carriers > 1 ? e.raw_entropy / e.max_entropy : 0.0;
    return e;
}

struct DirectionStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
    EntropySummary entropy;
    EntropySummary entropy_weighted;  // per-node degree-share variant
};

inline DirectionStats direction_stats(const std::vector<std::uint64_t>& degrees) {
    DirectionStats s;
    s.entropy = entropy_summary(degrees);
    s.entropy_weighted = entropy_per_node_weights(degrees);
    if (degrees.empty()) return s;
    long double sum = 0;
    for (auto d : degrees) sum += d;
    long double mean = sum / degrees.size();
    long double var = 0;
    for (auto d : degrees) {
        long double dx = static_cast<long double>(d) - mean;
        var += dx * dx;
    }
    s.mean = static_cast<double>(mean);
    s.stddev = static_cast<double>(std::sqrt(var / degrees.size()));
    return s;
}

struct DegreeSummary {
    NodeKind node_class = NodeKind::Script;
    std::uint64_t node_count = 0;  // N
    std::uint64_t edge_count = 0;  // E: edges incoming to this class
    std::optional<double> density;  // E / (N * (N-1)), undefined for N < 2
    DirectionStats in;
    DirectionStats out;
    DirectionStats total;
    // (in_bin, out_bin) -> node count; bins of width 10 labeled by lower bound
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> bivariate_bins;
};

inline std::uint64_t degree_bin(std::uint64_t degree, std::uint64_t width = 10) {
    return degree / width * width;
}

// Summary from explicit per-node (in, out) degree pairs.
inline DegreeSummary degree_summary_from_counts(
    NodeKind node_class, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& degrees) {
    DegreeSummary s;
    s.node_class = node_class;
    s.node_count = degrees.size();
    std::vector<std::uint64_t> in, out, total;
    in.reserve(degrees.size());
    out.reserve(degrees.size());
    total.reserve(degrees.size());
    for (const auto& [din, dout] : degrees) {
        in.push_back(din);
        out.push_back(dout);
        total.push_back(din + dout);
        s.edge_count += din;
        ++s.bivariate_bins[{degree_bin(din), degree_bin(dout)}];
    }
    if (s.node_count >= 2) {
        s.density = static_cast<double>(s.edge_count) /
                    (static_cast<double>(s.node_count) * static_cast<double>(s.node_count - 1));
    }
    s.in = direction_stats(in);
    s.out = direction_stats(out);
    s.total = direction_stats(total);
    return s;
}

// Streams a serialized layout and summarizes one node class, degrees taken
// over all edge types. Node files register zero-degree nodes; duplicates
// collapse on the ID.
inline DegreeSummary degree_summary(const std::filesystem::path& dir, const Manifest& manifest,
                                    NodeKind node_class) {
    std::unordered_map<std::string, std::pair<std::uint64_t, std::uint64_t>> degree;
    BatchReader reader(dir, manifest);
    while (auto batch = reader.next()) {
        for (const NodeRow& n : batch->nodes) {
            if (n.ref.kind == node_class) degree[n.ref.id];
        }
        for (const EdgeRecord& e : batch->edges) {
            if (e.src.kind == node_class) ++degree[e.src.id].second;
            if (e.dst.kind == node_class) ++degree[e.dst.id].first;
        }
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
    counts.reserve(degree.size());
    for (const auto& [id, d] : degree) counts.push_back(d);
    return degree_summary_from_counts(node_class, counts);
}

}  // namespace chaingraph
