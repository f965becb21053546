#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "chaingraph/errors.hpp"
#include "chaingraph/graph_build.hpp"
#include "chaingraph/sampler.hpp"
#include "chaingraph/tsv_io.hpp"
#include "chaingraph/util.hpp"

namespace chaingraph {

// Full pipeline configuration. Every field maps to a flat config-file key;
// CLI flags and CHAINGRAPH_* environment variables override file values
// (flags win over environment, environment over file, file over defaults).
struct RunConfig {
    // source
    std::string fixture_dir;
    std::string endpoint;
    std::uint64_t range_lo = 0;
    std::uint64_t range_hi = 0;

    // build
    ValueSplitConfig split;

    // output layout
    std::string out_dir;
    std::uint64_t batch_size = 100;
    Compression compression = Compression::None;
    bool dedup = true;

    // sampler
    SampleMethod sampler_method = SampleMethod::ForestFire;
    SamplerConfig sampler;
    std::string sampler_store;  // manifest directory or edge-list file
    std::string sampler_out;
    std::string roots_file;
    std::uint64_t num_samples = 0;

    // profiler
    std::string profile_out;
    bool profile_degree = true;
    bool profile_entropy_per_node = false;  // emit the degree-share entropy rows too
    std::uint64_t rolling_window = 5000;

    // run
    unsigned parallelism = 0;  // 0 = logical cores
    std::uint64_t memory_budget_mb = 64;
    int rest_timeout_seconds = 30;
    unsigned rest_prefetch = 4;
};

namespace detail {

inline bool parse_bool(std::string_view v, const std::string& key) {
    std::string s = to_lower(v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ParseError("config key " + key + ": expected boolean, got '" + std::string(v) + "'");
}

inline std::uint64_t parse_u64(std::string_view v, const std::string& key) {
    try {
        std::size_t used = 0;
        std::string s(v);
        std::uint64_t out = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ParseError("config key " + key + ": expected integer, got '" + std::string(v) + "'");
    }
}

inline std::int64_t parse_i64(std::string_view v, const std::string& key) {
    try {
        std::size_t used = 0;
        std::string s(v);
        std::int64_t out = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ParseError("config key " + key + ": expected integer, got '" + std::string(v) + "'");
    }
}

inline std::vector<NodeKind> parse_node_kinds(std::string_view v, const std::string& key) {
    std::vector<NodeKind> out;
    if (v.empty()) return out;
    for (auto token : split_view(v, ',')) {
        auto k = node_kind_from_name(token);
        if (!k) throw ParseError("config key " + key + ": unknown node kind '" + std::string(token) + "'");
        out.push_back(*k);
    }
    return out;
}

inline std::vector<EdgeType> parse_edge_types(std::string_view v, const std::string& key) {
    std::vector<EdgeType> out;
    if (v.empty()) return out;
    for (auto token : split_view(v, ',')) {
        auto t = edge_type_from_name(token);
        if (!t) throw ParseError("config key " + key + ": unknown edge type '" + std::string(token) + "'");
        out.push_back(*t);
    }
    return out;
}

inline std::string join_node_kinds(const std::vector<NodeKind>& v) {
    std::string out;
    for (auto k : v) {
        if (!out.empty()) out.push_back(',');
        out += node_kind_name(k);
    }
    return out;
}

inline std::string join_edge_types(const std::vector<EdgeType>& v) {
    std::string out;
    for (auto t : v) {
        if (!out.empty()) out.push_back(',');
        out += edge_type_name(t);
    }
    return out;
}

}  // namespace detail

inline void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "source.fixture_dir") cfg.fixture_dir = value;
    else if (key == "source.endpoint") cfg.endpoint = value;
    else if (key == "range.lo") cfg.range_lo = parse_u64(value, key);
    else if (key == "range.hi") cfg.range_hi = parse_u64(value, key);
    else if (key == "build.transfer_mode") {
        if (value == "as_printed") cfg.split.transfer_denominator_mode = TransferDenominator::AsPrinted;
        else if (value == "conserving") cfg.split.transfer_denominator_mode = TransferDenominator::Conserving;
        else throw ParseError("config key build.transfer_mode: expected as_printed|conserving");
    } else if (key == "build.max_inout_threshold") {
        cfg.split.max_inout_threshold = static_cast<int>(parse_u64(value, key));
        if (cfg.split.max_inout_threshold < 1) {
            throw ParseError("build.max_inout_threshold must be >= 1");
        }
    } else if (key == "build.skip_zero_value") cfg.split.skip_zero_value = parse_bool(value, key);
    else if (key == "build.aggregate_tx_inputs") cfg.split.aggregate_tx_inputs = parse_bool(value, key);
    else if (key == "out.dir") cfg.out_dir = value;
    else if (key == "out.batch_size") {
        cfg.batch_size = parse_u64(value, key);
        if (cfg.batch_size == 0) throw ParseError("out.batch_size must be positive");
    } else if (key == "out.compression") {
        auto c = compression_from_name(value);
        if (!c) throw ParseError("config key out.compression: expected none|gzip");
        cfg.compression = *c;
    } else if (key == "out.dedup") cfg.dedup = parse_bool(value, key);
    else if (key == "sampler.method") {
        auto m = sample_method_from_name(value);
        if (!m) throw ParseError("config key sampler.method: expected bfs|dfs|forest_fire");
        cfg.sampler_method = *m;
    } else if (key == "sampler.h_max") cfg.sampler.h_max = static_cast<std::uint32_t>(parse_u64(value, key));
    else if (key == "sampler.n") cfg.sampler.n = static_cast<std::uint32_t>(parse_u64(value, key));
    else if (key == "sampler.delta") cfg.sampler.delta = parse_i64(value, key);
    else if (key == "sampler.seed") cfg.sampler.rng_seed = parse_u64(value, key);
    else if (key == "sampler.min_nodes") cfg.sampler.min_nodes = parse_u64(value, key);
    else if (key == "sampler.max_nodes") cfg.sampler.max_nodes = parse_u64(value, key) == 0 ? UINT64_MAX : parse_u64(value, key);
    else if (key == "sampler.min_edges") cfg.sampler.min_edges = parse_u64(value, key);
    else if (key == "sampler.max_edges") cfg.sampler.max_edges = parse_u64(value, key) == 0 ? UINT64_MAX : parse_u64(value, key);
    else if (key == "sampler.node_whitelist") cfg.sampler.node_whitelist = parse_node_kinds(value, key);
    else if (key == "sampler.node_blacklist") cfg.sampler.node_blacklist = parse_node_kinds(value, key);
    else if (key == "sampler.edge_whitelist") cfg.sampler.edge_whitelist = parse_edge_types(value, key);
    else if (key == "sampler.edge_blacklist") cfg.sampler.edge_blacklist = parse_edge_types(value, key);
    else if (key == "sampler.stop_on_nodes") cfg.sampler.stop_on_nodes = parse_node_kinds(value, key);
    else if (key == "sampler.stop_on_edges") cfg.sampler.stop_on_edges = parse_edge_types(value, key);
    else if (key == "sampler.direction") {
        if (value == "both") cfg.sampler.direction = TraversalDirection::Both;
        else if (value == "out") cfg.sampler.direction = TraversalDirection::Out;
        else if (value == "in") cfg.sampler.direction = TraversalDirection::In;
        else throw ParseError("config key sampler.direction: expected both|out|in");
    } else if (key == "sampler.store") cfg.sampler_store = value;
    else if (key == "sampler.out_dir") cfg.sampler_out = value;
    else if (key == "sampler.roots_file") cfg.roots_file = value;
    else if (key == "sampler.num_samples") cfg.num_samples = parse_u64(value, key);
    else if (key == "profile.out_dir") cfg.profile_out = value;
    else if (key == "profile.degree") cfg.profile_degree = parse_bool(value, key);
    else if (key == "profile.entropy_per_node") cfg.profile_entropy_per_node = parse_bool(value, key);
    else if (key == "profile.rolling_window") {
        cfg.rolling_window = parse_u64(value, key);
        if (cfg.rolling_window == 0) throw ParseError("profile.rolling_window must be >= 1");
    } else if (key == "run.parallelism") cfg.parallelism = static_cast<unsigned>(parse_u64(value, key));
    else if (key == "run.memory_budget_mb") cfg.memory_budget_mb = parse_u64(value, key);
    else if (key == "rest.timeout_seconds") cfg.rest_timeout_seconds = static_cast<int>(parse_u64(value, key));
    else if (key == "rest.prefetch") cfg.rest_prefetch = static_cast<unsigned>(parse_u64(value, key));
    else throw ParseError("unknown config key '" + key + "'");
}

inline std::vector<std::pair<std::string, std::string>> dump_config(const RunConfig& cfg) {
    using namespace detail;
    auto dir_name = [&] {
        switch (cfg.sampler.direction) {
            case TraversalDirection::Both: return "both";
            case TraversalDirection::Out: return "out";
            case TraversalDirection::In: return "in";
        }
        return "both";
    };
    return {
        {"source.fixture_dir", cfg.fixture_dir},
        {"source.endpoint", cfg.endpoint},
        {"range.lo", std::to_string(cfg.range_lo)},
        {"range.hi", std::to_string(cfg.range_hi)},
        {"build.transfer_mode",
         cfg.split.transfer_denominator_mode == TransferDenominator::AsPrinted ? "as_printed"
                                                                               : "conserving"},
        {"build.max_inout_threshold", std::to_string(cfg.split.max_inout_threshold)},
        {"build.skip_zero_value", cfg.split.skip_zero_value ? "true" : "false"},
        {"build.aggregate_tx_inputs", cfg.split.aggregate_tx_inputs ? "true" : "false"},
        {"out.dir", cfg.out_dir},
        {"out.batch_size", std::to_string(cfg.batch_size)},
        {"out.compression", compression_name(cfg.compression)},
        {"out.dedup", cfg.dedup ? "true" : "false"},
        {"sampler.method", sample_method_name(cfg.sampler_method)},
        {"sampler.h_max", std::to_string(cfg.sampler.h_max)},
        {"sampler.n", std::to_string(cfg.sampler.n)},
        {"sampler.delta", std::to_string(cfg.sampler.delta)},
        {"sampler.seed", std::to_string(cfg.sampler.rng_seed)},
        {"sampler.min_nodes", std::to_string(cfg.sampler.min_nodes)},
        {"sampler.max_nodes",
         cfg.sampler.max_nodes == UINT64_MAX ? "0" : std::to_string(cfg.sampler.max_nodes)},
        {"sampler.min_edges", std::to_string(cfg.sampler.min_edges)},
        {"sampler.max_edges",
         cfg.sampler.max_edges == UINT64_MAX ? "0" : std::to_string(cfg.sampler.max_edges)},
        {"sampler.node_whitelist", join_node_kinds(cfg.sampler.node_whitelist)},
        {"sampler.node_blacklist", join_node_kinds(cfg.sampler.node_blacklist)},
        {"sampler.edge_whitelist", join_edge_types(cfg.sampler.edge_whitelist)},
        {"sampler.edge_blacklist", join_edge_types(cfg.sampler.edge_blacklist)},
        {"sampler.stop_on_nodes", join_node_kinds(cfg.sampler.stop_on_nodes)},
        {"sampler.stop_on_edges", join_edge_types(cfg.sampler.stop_on_edges)},
        {"sampler.direction", dir_name()},
        {"sampler.store", cfg.sampler_store},
        {"sampler.out_dir", cfg.sampler_out},
        {"sampler.roots_file", cfg.roots_file},
        {"sampler.num_samples", std::to_string(cfg.num_samples)},
        {"profile.out_dir", cfg.profile_out},
        {"profile.degree", cfg.profile_degree ? "true" : "false"},
        {"profile.entropy_per_node", cfg.profile_entropy_per_node ? "true" : "false"},
        {"profile.rolling_window", std::to_string(cfg.rolling_window)},
        {"run.parallelism", std::to_string(cfg.parallelism)},
        {"run.memory_budget_mb", std::to_string(cfg.memory_budget_mb)},
        {"rest.timeout_seconds", std::to_string(cfg.rest_timeout_seconds)},
        {"rest.prefetch", std::to_string(cfg.rest_prefetch)},
    };
}

// Flat key = value file; blank lines and '#' comments ignored.
inline void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open config file " + path.string());
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\r");
            std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config file " + path.string() + " line " + std::to_string(line_no) +
                             ": expected key = value");
        }
        apply_config_value(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
}

// CHAINGRAPH_RANGE_LO overrides range.lo, and so on: dots become underscores,
// letters uppercase.
inline void apply_env_overrides(RunConfig& cfg, const char* prefix = "CHAINGRAPH_") {
    for (const auto& [key, unused] : dump_config(cfg)) {
        std::string env_name = prefix;
        for (char c : key) {
            env_name.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(c)));
        }
        if (const char* v = std::getenv(env_name.c_str())) {
            apply_config_value(cfg, key, v);
        }
    }
}

}  // namespace chaingraph
