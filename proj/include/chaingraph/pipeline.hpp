#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaingraph/block_source.hpp"
#include "chaingraph/config.hpp"
#include "chaingraph/dedup.hpp"
#include "chaingraph/degree.hpp"
#include "chaingraph/features.hpp"
#include "chaingraph/graph_build.hpp"
#include "chaingraph/graph_store.hpp"
#include "chaingraph/parallel.hpp"
#include "chaingraph/sampler.hpp"
#include "chaingraph/serialize.hpp"
#include "chaingraph/stats.hpp"

namespace chaingraph {

namespace detail {

inline std::unique_ptr<BlockSource> make_source(const RunConfig& cfg, std::uint64_t lo,
                                                std::uint64_t hi) {
    bool has_fixture = !cfg.fixture_dir.empty();
    bool has_endpoint = !cfg.endpoint.empty();
    if (has_fixture == has_endpoint) {
        throw Error("configure exactly one of source.fixture_dir and source.endpoint",
                    ExitCode::Transport);
    }
    if (lo > hi) {
        throw SequencingError("empty range: " + std::to_string(lo) + " > " + std::to_string(hi));
    }
    if (has_fixture) return std::make_unique<FixtureSource>(cfg.fixture_dir, lo, hi);
    RestConfig rest;
    rest.endpoint = cfg.endpoint;
    rest.timeout_seconds = cfg.rest_timeout_seconds;
    return std::make_unique<RestSource>(rest, lo, hi, cfg.rest_prefetch);
}

inline void require_valid(const BlockRecord& b) {
    ValidationReport report = validate_block(b);
    if (report.empty()) return;
    std::string msg = "block " + std::to_string(b.height) + " failed validation:";
    for (const Violation& v : report) msg += "\n  [" + v.rule + "] " + v.detail;
    throw InvariantError(msg);
}

// Pulls blocks from the source in chunks, validates, and builds graphs on the
// worker pool; consume() sees them strictly in height order.
template <typename Consume>
inline void build_in_order(BlockSource& source, const RunConfig& cfg, const Consume& consume) {
    unsigned workers = cfg.parallelism == 0 ? default_parallelism() : cfg.parallelism;
    const std::size_t chunk_size = std::max<std::size_t>(workers * 8, 32);
    while (true) {
        auto chunk = std::make_shared<std::vector<BlockRecord>>();
        chunk->reserve(chunk_size);
        while (chunk->size() < chunk_size) {
            auto b = source.next();
            if (!b) break;
            chunk->push_back(std::move(*b));
        }
        if (chunk->empty()) break;
        const ValueSplitConfig split = cfg.split;
        OrderedParallel<BuildResult> pipe(
            chunk->size(), workers, chunk_size,
            [chunk, split](std::uint64_t i) {
                require_valid((*chunk)[i]);
                return build_block_graph((*chunk)[i], split);
            });
        std::size_t i = 0;
        while (auto result = pipe.pull()) {
            consume((*chunk)[i], *result);
            ++i;
        }
        if (chunk->size() < chunk_size) break;
    }
}

}  // namespace detail

// build: ingest -> validate -> graph -> batched TSV (+ dedup); prints the
// manifest path on success.
inline int cmd_build(const RunConfig& cfg, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
    if (cfg.out_dir.empty()) throw Error("out.dir is required for build", ExitCode::Transport);
    auto source = detail::make_source(cfg, cfg.range_lo, cfg.range_hi);
    BatchWriter writer(cfg.out_dir, cfg.batch_size, cfg.compression);
    detail::build_in_order(*source, cfg, [&](const BlockRecord&, const BuildResult& r) {
        for (const std::string& w : r.warnings) err << "warning: " << w << "\n";
        writer.add(r.graph);
    });
    Manifest manifest = writer.finish(source->tip_height());
    if (cfg.dedup) {
        DedupOptions opts{cfg.memory_budget_mb << 20};
        manifest = dedup_nodes(cfg.out_dir, manifest, opts);
    }
    out << (std::filesystem::path(cfg.out_dir) / "manifest.json").string() << "\n";
    return 0;
}

// append: extend an existing layout with the next contiguous height range.
inline int cmd_append(const RunConfig& cfg, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    if (cfg.out_dir.empty()) throw Error("out.dir is required for append", ExitCode::Transport);
    AppendSession session(cfg.out_dir);
    std::uint64_t expected = session.expected_next_height();
    if (cfg.range_lo != 0 && cfg.range_lo != expected) {
        throw SequencingError("append must start at height " + std::to_string(expected) +
                              ", config asks for " + std::to_string(cfg.range_lo));
    }
    if (cfg.range_hi < expected) {
        // Empty append: nothing to do, manifest unchanged.
        out << (std::filesystem::path(cfg.out_dir) / "manifest.json").string() << "\n";
        return 0;
    }
    auto source = detail::make_source(cfg, expected, cfg.range_hi);
    detail::build_in_order(*source, cfg, [&](const BlockRecord&, const BuildResult& r) {
        for (const std::string& w : r.warnings) err << "warning: " << w << "\n";
        session.add(r.graph);
    });
    session.finish();
    out << (std::filesystem::path(cfg.out_dir) / "manifest.json").string() << "\n";
    return 0;
}

namespace detail {

inline GraphStore load_store(const RunConfig& cfg) {
    if (cfg.sampler_store.empty()) {
        throw Error("sampler.store must name a manifest directory or an edge-list file",
                    ExitCode::Transport);
    }
    std::filesystem::path p(cfg.sampler_store);
    if (std::filesystem::is_directory(p)) {
        return GraphStore::from_manifest(p, load_manifest(p));
    }
    return GraphStore::from_edge_list(p);
}

inline std::vector<NodeRef> collect_roots(const RunConfig& cfg, const GraphStore& store) {
    std::vector<NodeRef> roots;
    if (!cfg.roots_file.empty()) {
        LineReader reader(cfg.roots_file, Compression::None);
        std::uint64_t line_no = 0;
        while (auto line = reader.next_line()) {
            ++line_no;
            if (line->empty() || (*line)[0] == '#') continue;
            roots.push_back(GraphStore::parse_prefixed_ref(*line, line_no));
        }
        return roots;
    }
    if (cfg.num_samples == 0) {
        throw Error("set sampler.num_samples or sampler.roots_file", ExitCode::Transport);
    }
    if (store.node_count() == 0) throw Error("store is empty", ExitCode::Transport);
    CounterRng rng(cfg.sampler.rng_seed ^ 0x726f6f7473ULL);  // distinct root-draw stream
    for (std::uint64_t i = 0; i < cfg.num_samples; ++i) {
        roots.push_back(store.node(static_cast<std::uint32_t>(rng.next_below(store.node_count()))));
    }
    return roots;
}

}  // namespace detail

// sample: emit node/edge/label files per subgraph plus the dataset labels
// file. Per-root failures are reported, not fatal.
inline int cmd_sample(const RunConfig& cfg, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    if (cfg.sampler_out.empty()) throw Error("sampler.out_dir is required", ExitCode::Transport);
    GraphStore store = detail::load_store(cfg);
    std::vector<NodeRef> roots = detail::collect_roots(cfg, store);

    std::filesystem::create_directories(cfg.sampler_out);
    FileWriter labels(std::filesystem::path(cfg.sampler_out) / "labels.tsv", Compression::None);
    labels.write("sample_id\tlabel\n");
    FileWriter report(std::filesystem::path(cfg.sampler_out) / "report.tsv", Compression::None);
    report.write("sample_id\troot\tstatus\tnodes\tedges\tdetail\n");

    std::uint64_t accepted = 0, rejected = 0, failed = 0, label_rows = 0, report_rows = 0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "sample-%06zu", i);
        SamplerConfig per_run = cfg.sampler;
        per_run.rng_seed = cfg.sampler.rng_seed + i;
        std::string root_desc = std::string(node_kind_name(roots[i].kind)) + ":" + roots[i].id;
        try {
            Subgraph s = sample(store, roots[i], per_run, cfg.sampler_method);
            if (auto reason = size_violation(per_run, s)) {
                ++rejected;
                report.write(std::string(name) + "\t" + root_desc + "\trejected\t" +
                             std::to_string(s.node_ids.size()) + "\t" +
                             std::to_string(s.edge_ids.size()) + "\t" + *reason + "\n");
                ++report_rows;
                continue;
            }
            FeatureVectors f = encode_features(s);
            write_subgraph_files(f, cfg.sampler_out, name);
            labels.write(std::string(name) + "\t" + subgraph_label_name(f.label) + "\n");
            ++label_rows;
            report.write(std::string(name) + "\t" + root_desc + "\tok\t" +
                         std::to_string(s.node_ids.size()) + "\t" +
                         std::to_string(s.edge_ids.size()) + "\t" +
                         subgraph_label_name(f.label) + "\n");
            ++report_rows;
            ++accepted;
        } catch (const Error& e) {
            ++failed;
            err << "sample " << name << " (root " << root_desc << "): " << e.what() << "\n";
            report.write(std::string(name) + "\t" + root_desc + "\terror\t0\t0\t" +
                         std::string(e.what()) + "\n");
            ++report_rows;
        }
    }
    labels.close(label_rows);
    report.close(report_rows);
    out << "samples: " << accepted << " ok, " << rejected << " rejected, " << failed
        << " failed\n";
    return 0;
}

namespace detail {

inline std::string opt_cell(bool present, const std::string& v) { return present ? v : ""; }

inline std::string summary_cells(const Summary<std::uint64_t>& s) {
    if (!s.present) return "\t\t\t";
    return std::to_string(s.min) + "\t" + std::to_string(s.max) + "\t" + format_double(s.avg) +
           "\t" + std::to_string(s.sum);
}

inline std::string summary_cells(const Summary<Amount>& s) {
    if (!s.present) return "\t\t\t";
    return std::to_string(s.min) + "\t" + std::to_string(s.max) + "\t" + format_double(s.avg) +
           "\t" + std::to_string(s.sum);
}

inline std::string dormancy_cells(const DormancyStats& d) {
    if (!d.present) return "\t\t\t";
    return format_double(d.avg) + "\t" + format_double(d.median) + "\t" + std::to_string(d.min) +
           "\t" + std::to_string(d.max);
}

inline void write_degree_summary(const std::filesystem::path& dir, const DegreeSummary& s,
                                 bool entropy_per_node) {
    std::string cls = node_kind_name(s.node_class);
    {
        FileWriter f(dir / ("degree_" + to_lower(cls) + ".tsv"), Compression::None);
        f.write("metric\tin\tout\ttotal\n");
        std::uint64_t rows = 3;
        auto row = [&](const std::string& name, auto get) {
            f.write(name + "\t" + get(s.in) + "\t" + get(s.out) + "\t" + get(s.total) + "\n");
            ++rows;
        };
        f.write("node_count\t" + std::to_string(s.node_count) + "\t\t\n");
        f.write("edge_count\t" + std::to_string(s.edge_count) + "\t\t\n");
        f.write("density\t" + (s.density ? format_double(*s.density) : std::string("undefined")) +
                "\t\t\n");
        row("mean", [](const DirectionStats& d) { return format_double(d.mean); });
        row("stddev", [](const DirectionStats& d) { return format_double(d.stddev); });
        row("distinct_values",
            [](const DirectionStats& d) { return std::to_string(d.entropy.distinct_values); });
        row("raw_entropy", [](const DirectionStats& d) { return format_double(d.entropy.raw_entropy); });
        row("max_entropy", [](const DirectionStats& d) { return format_double(d.entropy.max_entropy); });
        row("normalized_entropy",
            [](const DirectionStats& d) { return format_double(d.entropy.normalized); });
        if (entropy_per_node) {
            row("weighted_raw_entropy",
                [](const DirectionStats& d) { return format_double(d.entropy_weighted.raw_entropy); });
            row("weighted_max_entropy",
                [](const DirectionStats& d) { return format_double(d.entropy_weighted.max_entropy); });
            row("weighted_normalized_entropy",
                [](const DirectionStats& d) { return format_double(d.entropy_weighted.normalized); });
        }
        f.close(rows);
    }
    {
        FileWriter f(dir / ("degree_hist_" + to_lower(cls) + ".tsv"), Compression::None);
        f.write("in_bin\tout_bin\tcount\n");
        std::uint64_t rows = 0;
        for (const auto& [bins, count] : s.bivariate_bins) {
            f.write(std::to_string(bins.first) + "\t" + std::to_string(bins.second) + "\t" +
                    std::to_string(count) + "\n");
            ++rows;
        }
        f.close(rows);
    }
}

}  // namespace detail

// profile: per-block statistics TSVs plus whole-graph degree summaries and a
// global summary JSON.
inline int cmd_profile(const RunConfig& cfg, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    if (cfg.profile_out.empty()) throw Error("profile.out_dir is required", ExitCode::Transport);
    std::filesystem::path dir(cfg.profile_out);
    std::filesystem::create_directories(dir);

    // First-seen index continues across runs when the heights line up.
    std::filesystem::path index_path = dir / "addr_index.kv";
    AddressIndex addr_index = [&] {
        if (std::filesystem::exists(index_path)) {
            AddressIndex idx = AddressIndex::open(index_path);
            if (idx.next_height() == cfg.range_lo) return idx;
        }
        return AddressIndex::create(index_path, cfg.range_lo);
    }();

    FileWriter stats_file(dir / "block_stats.tsv", Compression::None);
    {
        std::string header =
            "height\ttx_count\tis_empty"
            "\ttxin_count_min\ttxin_count_max\ttxin_count_avg\ttxin_count_sum"
            "\ttxout_count_min\ttxout_count_max\ttxout_count_avg\ttxout_count_sum"
            "\ttxin_value_min\ttxin_value_max\ttxin_value_avg\ttxin_value_sum"
            "\ttxout_value_min\ttxout_value_max\ttxout_value_avg\ttxout_value_sum"
            "\taddr_total\taddr_unique\taddr_new"
            "\tfee_total\tminted\tunclaimed\tresidual_total"
            "\tdormancy_avg\tdormancy_median\tdormancy_min\tdormancy_max"
            "\tminted_spent_count\tminted_spent_value"
            "\tminted_age_avg\tminted_age_median\tminted_age_min\tminted_age_max";
        for (std::size_t i = 0; i < kScriptTypeCount; ++i) {
            header += "\tscripts_";
            header += kScriptTypeNames[i];
        }
        stats_file.write(header + "\n");
    }
    FileWriter share_file(dir / "script_type_share.tsv", Compression::None);
    {
        std::string header = "height";
        for (std::size_t i = 0; i < kScriptTypeCount; ++i) {
            header += "\tshare_out_";
            header += kScriptTypeNames[i];
        }
        for (std::size_t i = 0; i < kScriptTypeCount; ++i) {
            header += "\tshare_all_";
            header += kScriptTypeNames[i];
        }
        share_file.write(header + "\n");
    }

    ResidualScan residuals;
    std::uint64_t blocks = 0, empty_blocks = 0, tx_total = 0;
    Amount fee_sum = 0, minted_sum = 0, unclaimed_sum = 0;
    std::uint64_t addr_new_sum = 0;
    std::vector<double> tx_counts_series;
    std::vector<double> addr_new_series;
    std::vector<std::int64_t> recent_times;  // cross-check of reported median-time-past

    auto source = detail::make_source(cfg, cfg.range_lo, cfg.range_hi);
    std::uint64_t stats_rows = 0;
    while (auto b = source->next()) {
        detail::require_valid(*b);
        BlockStats s = per_block_stats(*b, addr_index);
        residuals.add(*b);
        ++blocks;
        if (s.is_empty) ++empty_blocks;
        tx_total += s.tx_count;
        fee_sum += s.fee_total;
        minted_sum += s.minted;
        unclaimed_sum += s.unclaimed;
        addr_new_sum += s.addr_new;
        tx_counts_series.push_back(static_cast<double>(s.tx_count));
        addr_new_series.push_back(static_cast<double>(s.addr_new));

        if (b->time != 0 && cfg.range_lo == 0) {
            recent_times.push_back(b->time);
            if (recent_times.size() > 11) recent_times.erase(recent_times.begin());
            std::int64_t expect = median_time_past(recent_times);
            if (expect != b->median_time) {
                err << "warning: block " << b->height << " reports median time "
                    << b->median_time << ", recomputation gives " << expect << "\n";
            }
        }

        std::string row = std::to_string(s.height) + "\t" + std::to_string(s.tx_count) + "\t" +
                          (s.is_empty ? "1" : "0") + "\t" + detail::summary_cells(s.txin_count) +
                          "\t" + detail::summary_cells(s.txout_count) + "\t" +
                          detail::summary_cells(s.txin_value) + "\t" +
                          detail::summary_cells(s.txout_value) + "\t" +
                          std::to_string(s.addr_total) + "\t" + std::to_string(s.addr_unique) +
                          "\t" + std::to_string(s.addr_new) + "\t" + std::to_string(s.fee_total) +
                          "\t" + std::to_string(s.minted) + "\t" + std::to_string(s.unclaimed) +
                          "\t" + std::to_string(s.residual_total) + "\t" +
                          detail::dormancy_cells(s.dormancy) + "\t" +
                          std::to_string(s.minted_spent_count) + "\t" +
                          std::to_string(s.minted_spent_value) + "\t" +
                          detail::dormancy_cells(s.minted_spend_age);
        for (std::size_t i = 0; i < kScriptTypeCount; ++i) {
            row += "\t" + std::to_string(s.script_type_counts[i]);
        }
        stats_file.write(row + "\n");
        ++stats_rows;

        ScriptTypeShare share = script_type_share(*b);
        auto out_frac = ScriptTypeShare::fractions(share.txout_counts);
        auto all_frac = ScriptTypeShare::fractions(share.txin_txout_counts);
        std::string share_row = std::to_string(s.height);
        for (double fr : out_frac) share_row += "\t" + format_double(fr);
        for (double fr : all_frac) share_row += "\t" + format_double(fr);
        share_file.write(share_row + "\n");
    }
    stats_file.close(stats_rows);
    share_file.close(stats_rows);

    {
        FileWriter f(dir / "residual_blocks.tsv", Compression::None);
        f.write("height\tresidual_total\n");
        std::uint64_t rows = 0;
        for (const auto& pb : residuals.per_block) {
            if (pb.total == 0) continue;
            f.write(std::to_string(pb.height) + "\t" + std::to_string(pb.total) + "\n");
            ++rows;
        }
        f.close(rows);
    }

    {
        FileWriter f(dir / "tx_count_rolling.tsv", Compression::None);
        f.write("height\ttx_count\trolling_mean\n");
        auto rolled = rolling_mean(tx_counts_series, cfg.rolling_window);
        for (std::size_t i = 0; i < rolled.size(); ++i) {
            f.write(std::to_string(cfg.range_lo + i) + "\t" +
                    format_double(tx_counts_series[i]) + "\t" + format_double(rolled[i]) + "\n");
        }
        f.close(rolled.size());
    }

    nlohmann::json summary;
    summary["blocks"] = blocks;
    summary["empty_blocks"] = empty_blocks;
    summary["tx_total"] = tx_total;
    summary["fee_total_sat"] = fee_sum;
    summary["minted_total_sat"] = minted_sum;
    summary["unclaimed_total_sat"] = unclaimed_sum;
    summary["residual_total_sat"] = residuals.global_sum;
    summary["residual_buckets"] = {{"le_1sat", residuals.buckets[0]},
                                   {"le_1btc", residuals.buckets[1]},
                                   {"gt_1btc", residuals.buckets[2]}};
    summary["residual_blocks"] = residuals.flagged.size();
    summary["unique_addresses"] = addr_index.unique_addresses();
    summary["new_addresses"] = addr_new_sum;
    if (!tx_counts_series.empty() && tx_counts_series.size() == addr_new_series.size()) {
        bool variance = false;
        for (double v : tx_counts_series) variance |= v != tx_counts_series.front();
        bool variance2 = false;
        for (double v : addr_new_series) variance2 |= v != addr_new_series.front();
        if (variance && variance2) {
            summary["pearson_txcount_addrnew"] = pearson(tx_counts_series, addr_new_series);
        }
    }

    if (cfg.profile_degree && !cfg.out_dir.empty() &&
        std::filesystem::exists(std::filesystem::path(cfg.out_dir) / "manifest.json")) {
        Manifest manifest = load_manifest(cfg.out_dir);
        for (NodeKind cls : {NodeKind::Block, NodeKind::Tx, NodeKind::Script}) {
            DegreeSummary ds = degree_summary(cfg.out_dir, manifest, cls);
            detail::write_degree_summary(dir, ds, cfg.profile_entropy_per_node);
            nlohmann::json jd;
            jd["node_count"] = ds.node_count;
            jd["edge_count"] = ds.edge_count;
            if (ds.density) jd["density"] = *ds.density;
            jd["normalized_entropy_in"] = ds.in.entropy.normalized;
            jd["normalized_entropy_out"] = ds.out.entropy.normalized;
            summary["degree"][to_lower(node_kind_name(cls))] = std::move(jd);
        }
    }

    std::ofstream js(dir / "summary.json", std::ios::binary | std::ios::trunc);
    js << summary.dump(2) << "\n";
    out << (dir / "summary.json").string() << "\n";
    return 0;
}

}  // namespace chaingraph
