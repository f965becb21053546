#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaingraph/errors.hpp"
#include "chaingraph/graph.hpp"
#include "chaingraph/manifest.hpp"
#include "chaingraph/tsv_io.hpp"
#include "chaingraph/util.hpp"

namespace chaingraph {

// One file per node label or edge type per batch.
enum class BatchFile : std::uint8_t {
    NodesCoinbase = 0,
    NodesScript,
    NodesTx,
    NodesBlock,
    EdgesMints,
    EdgesTransfers,
    EdgesFee,
    EdgesRedeems,
    EdgesConfirms,
    EdgesCredits,
};

inline constexpr std::size_t kBatchFileCount = 10;

struct BatchFileInfo {
    const char* basename;
    const char* kind;
    const char* type;
    const char* header;
};

// Header rows use the Neo4j bulk-import role annotations (:ID, :LABEL,
// :START_ID, :END_ID, :TYPE). Exact strings are part of the file format and
// documented in docs/formats.md.
inline constexpr std::array<BatchFileInfo, kBatchFileCount> kBatchFiles{{
    {"nodes_coinbase", "nodes", "Coinbase", "id:ID\t:LABEL\theight:long"},
    {"nodes_script", "nodes", "Script", "id:ID\t:LABEL\tscript_type\theight:long"},
    {"nodes_tx", "nodes", "Tx",
     "id:ID\t:LABEL\tsize:long\tvsize:long\tweight:long\tversion\tlock_time:long\theight:long"},
    {"nodes_block", "nodes", "Block",
     "id:ID\t:LABEL\theight:long\tmedian_time:long\tdifficulty:double\tn_tx:long\tsize:long\t"
     "stripped_size:long\tweight:long"},
    {"edges_mints", "edges", "Mints", ":START_ID\t:END_ID\t:TYPE\tvalue_sat:long\theight:long"},
    {"edges_transfers", "edges", "Transfers",
     ":START_ID\t:END_ID\t:TYPE\tvalue_sat:long\theight:long"},
    {"edges_fee", "edges", "Fee", ":START_ID\t:END_ID\t:TYPE\tvalue_sat:long\theight:long"},
    {"edges_redeems", "edges", "Redeems", ":START_ID\t:END_ID\t:TYPE\tvalue_sat:long\theight:long"},
    {"edges_confirms", "edges", "Confirms",
     ":START_ID\t:END_ID\t:TYPE\tvalue_sat:long\theight:long"},
    {"edges_credits", "edges", "Credits", ":START_ID\t:END_ID\t:TYPE\tvalue_sat:long\theight:long"},
}};

inline BatchFile batch_file_for_edge(EdgeType t) {
    return static_cast<BatchFile>(static_cast<std::size_t>(BatchFile::EdgesMints) +
                                  static_cast<std::size_t>(t));
}

// Which column of a node row carries the height (first-seen ordering key).
inline std::size_t node_height_column(BatchFile f) {
    switch (f) {
        case BatchFile::NodesCoinbase: return 2;
        case BatchFile::NodesScript: return 3;
        case BatchFile::NodesTx: return 7;
        case BatchFile::NodesBlock: return 2;
        default: throw Error("not a node file");
    }
}

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error("cannot format double");
    return std::string(buf, end);
}

namespace detail {

inline void append_cell(std::string& row, std::string_view cell) {
    if (!row.empty()) row.push_back('\t');
    row.append(cell);
}

}  // namespace detail

// Renders a block graph into per-file TSV rows, in deterministic emission
// order: node insertion order, then edge emission order.
struct BatchRows {
    std::array<std::vector<std::string>, kBatchFileCount> rows;

    bool empty(BatchFile f) const { return rows[static_cast<std::size_t>(f)].empty(); }
    std::vector<std::string>& of(BatchFile f) { return rows[static_cast<std::size_t>(f)]; }
    const std::vector<std::string>& of(BatchFile f) const {
        return rows[static_cast<std::size_t>(f)];
    }

    void add_graph(const BlockGraph& g, bool with_coinbase_row) {
        const std::string height = std::to_string(g.height);
        if (g.has_coinbase_node && with_coinbase_row) {
            of(BatchFile::NodesCoinbase).push_back("coinbase\tCoinbase\t" + height);
        }
        for (const auto& [id, props] : g.script_nodes) {
            std::string row = tsv_escape(id);
            detail::append_cell(row, "Script");
            detail::append_cell(row, script_type_name(props.script_type));
            detail::append_cell(row, height);
            of(BatchFile::NodesScript).push_back(std::move(row));
        }
        for (const auto& [id, props] : g.tx_nodes) {
            std::string row = tsv_escape(id);
            detail::append_cell(row, "Tx");
            if (props.stub) {
                row.append("\t\t\t\t\t");
            } else {
                detail::append_cell(row, std::to_string(props.size_bytes));
                detail::append_cell(row, std::to_string(props.vsize));
                detail::append_cell(row, std::to_string(props.weight_units));
                detail::append_cell(row, tsv_escape(props.version));
                detail::append_cell(row, std::to_string(props.lock_time));
            }
            detail::append_cell(row, height);
            of(BatchFile::NodesTx).push_back(std::move(row));
        }
        {
            const BlockNodeProps& p = g.block_node;
            std::string row = std::to_string(p.height);
            detail::append_cell(row, "Block");
            detail::append_cell(row, std::to_string(p.height));
            detail::append_cell(row, std::to_string(p.median_time));
            detail::append_cell(row, format_double(p.difficulty));
            detail::append_cell(row, std::to_string(p.n_tx));
            detail::append_cell(row, std::to_string(p.size_bytes));
            detail::append_cell(row, std::to_string(p.stripped_size_bytes));
            detail::append_cell(row, std::to_string(p.weight_units));
            of(BatchFile::NodesBlock).push_back(std::move(row));
        }
        for (const EdgeRecord& e : g.edges) {
            std::string row = tsv_escape(e.src.id);
            detail::append_cell(row, tsv_escape(e.dst.id));
            detail::append_cell(row, edge_type_name(e.type));
            detail::append_cell(row, std::to_string(e.value));
            detail::append_cell(row, std::to_string(e.height));
            of(batch_file_for_edge(e.type)).push_back(std::move(row));
        }
    }
};

inline std::string batch_dir_name(std::uint64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "batch-%06llu", static_cast<unsigned long long>(index));
    return buf;
}

// Streams block graphs into batched TSV files. Batch k covers heights
// [k*batch_size, (k+1)*batch_size); files are written when a batch completes,
// so memory holds at most one batch. IO failures clean up the partial batch
// before rethrowing.
class BatchWriter {
public:
    BatchWriter(std::filesystem::path out_dir, std::uint64_t batch_size, Compression compression)
        : out_dir_(std::move(out_dir)), batch_size_(batch_size), compression_(compression) {
        if (batch_size_ == 0) throw Error("batch_size must be positive");
        std::filesystem::create_directories(out_dir_);
        manifest_.batch_size = batch_size_;
        manifest_.compression = compression_;
    }

    // Resumes writing into an existing layout: reloads the trailing partial
    // batch so its files can be extended, and drops it from the manifest
    // until it is flushed again.
    static BatchWriter resume(std::filesystem::path out_dir, Manifest manifest) {
        BatchWriter w(out_dir, manifest.batch_size, manifest.compression);
        std::uint64_t last_height = manifest.height_max;
        if (!manifest.batches.empty()) {
            const BatchEntry& last = manifest.batches.back();
            bool partial = (last.height_hi + 1) % manifest.batch_size != 0;
            if (partial) {
                for (const FileEntry& f : last.files) {
                    LineReader reader(out_dir / f.path, manifest.compression, f.sha256);
                    std::optional<std::string> header = reader.next_line();
                    if (!header) throw CorruptionError("empty batch file " + f.path);
                    auto file_id = find_file(f.path);
                    while (auto line = reader.next_line()) {
                        w.current_.of(file_id).push_back(std::move(*line));
                    }
                }
                w.batch_index_ = last.index;
                w.batch_lo_ = last.height_lo;
                w.batch_open_ = true;
                manifest.batches.pop_back();
            }
        }
        w.manifest_ = std::move(manifest);
        w.last_height_ = last_height;
        w.have_last_height_ = true;
        return w;
    }

    void add(const BlockGraph& g) {
        if (have_last_height_ && g.height <= last_height_) {
            throw SequencingError("block heights must be strictly ascending: got " +
                                  std::to_string(g.height) + " after " +
                                  std::to_string(last_height_));
        }
        std::uint64_t index = g.height / batch_size_;
        if (batch_open_ && index != batch_index_) flush_batch();
        if (!batch_open_) {
            batch_open_ = true;
            batch_index_ = index;
            batch_lo_ = g.height;
            current_ = BatchRows{};
        }
        current_.add_graph(g, current_.empty(BatchFile::NodesCoinbase));
        batch_hi_ = g.height;
        if (!have_last_height_) manifest_.height_min = g.height;
        last_height_ = g.height;
        have_last_height_ = true;
        manifest_.height_max = g.height;
    }

    Manifest finish(std::optional<std::uint64_t> tip_height = std::nullopt) {
        if (batch_open_) flush_batch();
        if (tip_height) manifest_.tip_height_at_extraction = tip_height;
        save_manifest(manifest_, out_dir_);
        return manifest_;
    }

    const Manifest& manifest() const { return manifest_; }

private:
    static BatchFile find_file(const std::string& rel_path) {
        std::filesystem::path p(rel_path);
        std::string name = p.filename().string();
        for (std::size_t i = 0; i < kBatchFileCount; ++i) {
            std::string base = kBatchFiles[i].basename;
            if (name == base + ".tsv" || name == base + ".tsv.gz") {
                return static_cast<BatchFile>(i);
            }
        }
        throw ParseError("unrecognized batch file name " + rel_path);
    }

    void flush_batch() {
        const std::string dir_name = batch_dir_name(batch_index_);
        std::filesystem::create_directories(out_dir_ / dir_name);
        BatchEntry entry{batch_index_, batch_lo_, batch_hi_, {}};
        std::vector<std::filesystem::path> written;
        try {
            for (std::size_t i = 0; i < kBatchFileCount; ++i) {
                const auto& rows = current_.rows[i];
                if (rows.empty()) continue;
                std::string rel = dir_name + "/" + kBatchFiles[i].basename +
                                  compression_suffix(compression_);
                FileWriter writer(out_dir_ / rel, compression_);
                written.push_back(out_dir_ / rel);
                writer.write(kBatchFiles[i].header);
                writer.write("\n");
                for (const std::string& row : rows) {
                    writer.write(row);
                    writer.write("\n");
                }
                auto result = writer.close(rows.size());
                entry.files.push_back(
                    {rel, kBatchFiles[i].kind, kBatchFiles[i].type, result.rows,
                     result.sha256_hex});
            }
        } catch (...) {
            for (const auto& p : written) {
                std::error_code ec;
                std::filesystem::remove(p, ec);
            }
            throw;
        }
        manifest_.batches.push_back(std::move(entry));
        batch_open_ = false;
        current_ = BatchRows{};
    }

    std::filesystem::path out_dir_;
    std::uint64_t batch_size_;
    Compression compression_;
    Manifest manifest_;

    BatchRows current_;
    bool batch_open_ = false;
    std::uint64_t batch_index_ = 0;
    std::uint64_t batch_lo_ = 0;
    std::uint64_t batch_hi_ = 0;
    std::uint64_t last_height_ = 0;
    bool have_last_height_ = false;
};

struct NodeRow {
    NodeRef ref;
    std::vector<std::string> cells;
};

// Infers the endpoint node kinds of an edge row. The edge type pins most of
// them; Mints targets and Transfers/Fee/Redeems endpoints disambiguate by ID
// shape: a 64-char hex string is a txid (addresses are never 64 hex chars,
// synthetic script IDs contain '-').
inline std::pair<NodeKind, NodeKind> infer_edge_kinds(EdgeType type, const std::string& src_id,
                                                      const std::string& dst_id) {
    auto looks_like_txid = [](const std::string& id) {
        return id.size() == 64 && is_hex_string(id);
    };
    switch (type) {
        case EdgeType::Mints:
            return {NodeKind::Coinbase,
                    looks_like_txid(dst_id) ? NodeKind::Tx : NodeKind::Script};
        case EdgeType::Transfers:
        case EdgeType::Fee:
            return looks_like_txid(src_id) ? std::pair{NodeKind::Tx, NodeKind::Tx}
                                           : std::pair{NodeKind::Script, NodeKind::Script};
        case EdgeType::Redeems:
            return {looks_like_txid(src_id) ? NodeKind::Tx : NodeKind::Script, NodeKind::Block};
        case EdgeType::Confirms:
            return {NodeKind::Block, NodeKind::Tx};
        case EdgeType::Credits:
            return {NodeKind::Block, NodeKind::Script};
    }
    throw Error("unreachable edge type");
}

struct LoadedBatch {
    std::uint64_t index = 0;
    std::uint64_t height_lo = 0;
    std::uint64_t height_hi = 0;
    std::vector<NodeRow> nodes;
    std::vector<EdgeRecord> edges;
};

// Inverse of BatchWriter modulo row order within a file. Digests are checked
// while streaming; a mismatch or truncation raises CorruptionError.
class BatchReader {
public:
    BatchReader(std::filesystem::path dir, Manifest manifest)
        : dir_(std::move(dir)), manifest_(std::move(manifest)) {}

    const Manifest& manifest() const { return manifest_; }

    std::optional<LoadedBatch> next() {
        if (pos_ >= manifest_.batches.size()) return std::nullopt;
        const BatchEntry& entry = manifest_.batches[pos_++];
        LoadedBatch out{entry.index, entry.height_lo, entry.height_hi, {}, {}};
        for (const FileEntry& f : entry.files) {
            if (f.kind == "nodes") {
                read_node_file(f, out.nodes);
            } else {
                read_edge_file(f, out.edges);
            }
        }
        return out;
    }

private:
    void read_node_file(const FileEntry& f, std::vector<NodeRow>& out) const {
        auto kind = node_kind_from_name(f.type);
        if (!kind) throw ParseError("unknown node type " + f.type + " in manifest");
        LineReader reader(dir_ / f.path, manifest_.compression, f.sha256);
        std::optional<std::string> header = reader.next_line();
        if (!header) throw CorruptionError("empty file " + f.path);
        std::uint64_t rows = 0;
        while (auto line = reader.next_line()) {
            auto cells_view = split_view(*line, '\t');
            NodeRow row;
            row.cells.reserve(cells_view.size());
            for (auto v : cells_view) row.cells.emplace_back(v);
            if (row.cells.empty()) throw CorruptionError("blank row in " + f.path);
            row.ref = NodeRef{*kind, tsv_unescape(row.cells[0])};
            out.push_back(std::move(row));
            ++rows;
        }
        if (rows != f.rows) {
            throw CorruptionError("row count mismatch in " + f.path + ": manifest says " +
                                  std::to_string(f.rows) + ", file has " + std::to_string(rows));
        }
    }

    void read_edge_file(const FileEntry& f, std::vector<EdgeRecord>& out) const {
        auto type = edge_type_from_name(f.type);
        if (!type) throw ParseError("unknown edge type " + f.type + " in manifest");
        LineReader reader(dir_ / f.path, manifest_.compression, f.sha256);
        std::optional<std::string> header = reader.next_line();
        if (!header) throw CorruptionError("empty file " + f.path);
        std::uint64_t rows = 0;
        while (auto line = reader.next_line()) {
            auto cells = split_view(*line, '\t');
            if (cells.size() != 5) throw CorruptionError("bad edge row in " + f.path);
            EdgeRecord e;
            std::string src_id = tsv_unescape(cells[0]);
            std::string dst_id = tsv_unescape(cells[1]);
            e.type = *type;
            auto [src_kind, dst_kind] = infer_edge_kinds(e.type, src_id, dst_id);
            e.src = NodeRef{src_kind, std::move(src_id)};
            e.dst = NodeRef{dst_kind, std::move(dst_id)};
            e.value = std::stoll(std::string(cells[3]));
            e.height = std::stoull(std::string(cells[4]));
            out.push_back(std::move(e));
            ++rows;
        }
        if (rows != f.rows) {
            throw CorruptionError("row count mismatch in " + f.path + ": manifest says " +
                                  std::to_string(f.rows) + ", file has " + std::to_string(rows));
        }
    }

    std::filesystem::path dir_;
    Manifest manifest_;
    std::size_t pos_ = 0;
};

}  // namespace chaingraph
