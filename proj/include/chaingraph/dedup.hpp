#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaingraph/disk_kv.hpp"
#include "chaingraph/extsort.hpp"
#include "chaingraph/manifest.hpp"
#include "chaingraph/serialize.hpp"
#include "chaingraph/util.hpp"

namespace chaingraph {

struct DedupOptions {
    std::uint64_t memory_budget_bytes = 64ull << 20;
};

namespace detail {

// Cells other than id, label, and height carry the node's properties.
inline bool props_equal_ignoring_height(const std::vector<std::string_view>& a,
                                        const std::vector<std::string_view>& b,
                                        std::size_t height_col) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 2; i < a.size(); ++i) {
        if (i == height_col) continue;
        if (a[i] != b[i]) return false;
    }
    return true;
}

// A stub row (referenced transaction with unknown properties) has every
// property cell empty; stubs never conflict with anything.
inline bool is_stub_row(const std::vector<std::string_view>& cells, std::size_t height_col) {
    bool any = false;
    for (std::size_t i = 2; i < cells.size(); ++i) {
        if (i == height_col) continue;
        any = true;
        if (!cells[i].empty()) return false;
    }
    return any;
}

}  // namespace detail

// Collapses node files so each node ID appears exactly once, keeping the
// first-seen (lowest height) property row. External merge sort bounded by the
// memory budget; duplicate IDs with conflicting non-stub properties land in a
// conflict report, not an error. Also builds the on-disk node ledger used by
// incremental appends. Returns peak tracked sorter bytes through *peak_bytes
// when requested.
inline Manifest dedup_nodes(const std::filesystem::path& dir, Manifest m,
                            const DedupOptions& opts = {},
                            std::uint64_t* peak_bytes = nullptr) {
    const std::filesystem::path dedup_dir = dir / "dedup";
    std::filesystem::create_directories(dedup_dir);

    DedupState state;
    state.ledger_path = "dedup/node_ledger.kv";
    state.conflicts_path = "dedup/conflicts.tsv";
    DiskKv ledger = DiskKv::create(dir / state.ledger_path);

    FileWriter conflicts(dir / state.conflicts_path, Compression::None);
    conflicts.write("node_type\tid\tkept_height\tconflicting_height\n");
    std::uint64_t conflict_rows = 0;
    std::uint64_t peak = 0;

    static constexpr std::array<BatchFile, 4> kNodeFiles = {
        BatchFile::NodesCoinbase, BatchFile::NodesScript, BatchFile::NodesTx,
        BatchFile::NodesBlock};

    for (BatchFile nf : kNodeFiles) {
        const BatchFileInfo& info = kBatchFiles[static_cast<std::size_t>(nf)];
        const std::size_t height_col = node_height_column(nf);

        ExternalSorter sorter(opts.memory_budget_bytes, dedup_dir / ("tmp-" + std::string(info.basename)));
        std::uint64_t input_rows = 0;
        for (const BatchEntry& batch : m.batches) {
            for (const FileEntry& f : batch.files) {
                if (f.kind != "nodes" || f.type != std::string(info.type)) continue;
                LineReader reader(dir / f.path, m.compression, f.sha256);
                auto header = reader.next_line();
                if (!header) throw CorruptionError("empty node file " + f.path);
                while (auto line = reader.next_line()) {
                    auto cells = split_view(*line, '\t');
                    if (cells.size() <= height_col) {
                        throw CorruptionError("short row in " + f.path);
                    }
                    std::uint64_t height = std::stoull(std::string(cells[height_col]));
                    sorter.add(cells[0], height, *line);
                    ++input_rows;
                }
            }
        }
        if (input_rows == 0) continue;

        std::string rel = "dedup/" + std::string(info.basename) + compression_suffix(m.compression);
        FileWriter out(dir / rel, m.compression);
        out.write(info.header);
        out.write("\n");

        std::uint64_t out_rows = 0;
        std::string kept_key;
        std::string kept_row;
        bool have_key = false;
        sorter.merge([&](std::string_view key, std::uint64_t rank, std::string_view payload) {
            if (!have_key || key != kept_key) {
                have_key = true;
                kept_key.assign(key);
                kept_row.assign(payload);
                out.write(payload);
                out.write("\n");
                ++out_rows;
                ledger.insert_if_absent(key, rank);
                return;
            }
            auto kept_cells = split_view(kept_row, '\t');
            auto row_cells = split_view(payload, '\t');
            if (!detail::is_stub_row(row_cells, height_col) &&
                !detail::is_stub_row(kept_cells, height_col) &&
                !detail::props_equal_ignoring_height(kept_cells, row_cells, height_col)) {
                conflicts.write(std::string(info.type) + "\t" + std::string(key) + "\t" +
                                std::string(kept_cells[height_col]) + "\t" +
                                std::to_string(rank) + "\n");
                ++conflict_rows;
            }
        });
        peak = std::max(peak, sorter.peak_tracked_bytes());
        auto result = out.close(out_rows);
        state.files.push_back({rel, info.kind, info.type, result.rows, result.sha256_hex});
    }

    auto conflict_result = conflicts.close(conflict_rows);
    state.conflicts = conflict_rows;
    ledger.flush();
    if (peak_bytes) *peak_bytes = peak;

    m.dedup = std::move(state);
    save_manifest(m, dir);
    return m;
}

// Extends an existing layout with blocks continuing at height_max + 1. Raw
// batches append through the batch writer; when the manifest carries a dedup
// state, the node ledger filters already-emitted node IDs out of the deduped
// node files.
class AppendSession {
public:
    explicit AppendSession(std::filesystem::path dir)
        : dir_(std::move(dir)), original_(load_manifest(dir_)),
          writer_(BatchWriter::resume(dir_, original_)) {
        expected_next_ = original_.height_max + 1;
        if (original_.dedup) {
            ledger_ = DiskKv::open(dir_ / original_.dedup->ledger_path);
        }
    }

    void add(const BlockGraph& g) {
        if (g.height != expected_next_) {
            throw SequencingError("append expects height " + std::to_string(expected_next_) +
                                  ", got " + std::to_string(g.height));
        }
        ++expected_next_;
        ++added_;
        if (ledger_) {
            BatchRows rows;
            rows.add_graph(g, true);
            static constexpr std::array<BatchFile, 4> kNodeFiles = {
                BatchFile::NodesCoinbase, BatchFile::NodesScript, BatchFile::NodesTx,
                BatchFile::NodesBlock};
            for (std::size_t i = 0; i < kNodeFiles.size(); ++i) {
                for (const std::string& row : rows.of(kNodeFiles[i])) {
                    std::string_view id = split_view(row, '\t')[0];
                    if (!ledger_->insert_if_absent(id, g.height)) {
                        new_dedup_rows_[i].push_back(row);
                    }
                }
            }
        }
        writer_.add(g);
    }

    // Finalizes batches, rewrites deduped node files with the new rows, and
    // saves the updated manifest. With no blocks added the layout is
    // untouched and the original manifest comes back unchanged.
    Manifest finish() {
        if (added_ == 0) return original_;
        Manifest m = writer_.finish(original_.tip_height_at_extraction);
        if (original_.dedup) {
            DedupState state = *original_.dedup;
            static constexpr std::array<BatchFile, 4> kNodeFiles = {
                BatchFile::NodesCoinbase, BatchFile::NodesScript, BatchFile::NodesTx,
                BatchFile::NodesBlock};
            for (std::size_t i = 0; i < kNodeFiles.size(); ++i) {
                if (new_dedup_rows_[i].empty()) continue;
                const BatchFileInfo& info = kBatchFiles[static_cast<std::size_t>(kNodeFiles[i])];
                std::string rel = "dedup/" + std::string(info.basename) +
                                  compression_suffix(m.compression);
                std::vector<std::string> lines;
                auto entry = std::find_if(state.files.begin(), state.files.end(),
                                          [&](const FileEntry& f) { return f.path == rel; });
                if (entry != state.files.end()) {
                    LineReader reader(dir_ / rel, m.compression, entry->sha256);
                    auto header = reader.next_line();
                    if (!header) throw CorruptionError("empty dedup file " + rel);
                    while (auto line = reader.next_line()) lines.push_back(std::move(*line));
                }
                lines.insert(lines.end(), new_dedup_rows_[i].begin(), new_dedup_rows_[i].end());
                FileWriter out(dir_ / rel, m.compression);
                out.write(info.header);
                out.write("\n");
                for (const std::string& line : lines) {
                    out.write(line);
                    out.write("\n");
                }
                auto result = out.close(lines.size());
                FileEntry updated{rel, info.kind, info.type, result.rows, result.sha256_hex};
                if (entry != state.files.end()) {
                    *entry = updated;
                } else {
                    state.files.push_back(updated);
                }
            }
            ledger_->flush();
            m.dedup = std::move(state);
            save_manifest(m, dir_);
        }
        return m;
    }

    std::uint64_t expected_next_height() const { return expected_next_; }

private:
    std::filesystem::path dir_;
    Manifest original_;
    BatchWriter writer_;
    std::optional<DiskKv> ledger_;
    std::array<std::vector<std::string>, 4> new_dedup_rows_;
    std::uint64_t expected_next_ = 0;
    std::uint64_t added_ = 0;
};

}  // namespace chaingraph
