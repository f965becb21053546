#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaingraph/errors.hpp"
#include "chaingraph/tsv_io.hpp"

namespace chaingraph {

// Index of everything a run wrote: per-batch files with row counts and
// content digests, plus the state needed for incremental appends.
struct FileEntry {
    std::string path;  // relative to the manifest directory
    std::string kind;  // "nodes" | "edges"
    std::string type;  // node label or edge type name
    std::uint64_t rows = 0;
    std::string sha256;
};

struct BatchEntry {
    std::uint64_t index = 0;
    std::uint64_t height_lo = 0;
    std::uint64_t height_hi = 0;
    std::vector<FileEntry> files;
};

struct DedupState {
    std::vector<FileEntry> files;
    std::string ledger_path;  // on-disk set of already-emitted node IDs
    std::string conflicts_path;
    std::uint64_t conflicts = 0;
};

struct Manifest {
    static constexpr int kFormatVersion = 1;

    std::uint64_t batch_size = 0;
    Compression compression = Compression::None;
    std::uint64_t height_min = 0;
    std::uint64_t height_max = 0;
    std::optional<std::uint64_t> tip_height_at_extraction;
    std::vector<BatchEntry> batches;
    std::optional<DedupState> dedup;
};

inline nlohmann::json to_json(const FileEntry& f) {
    return {{"path", f.path}, {"kind", f.kind}, {"type", f.type}, {"rows", f.rows},
            {"sha256", f.sha256}};
}

inline FileEntry file_entry_from_json(const nlohmann::json& j) {
    FileEntry f;
    f.path = j.at("path").get<std::string>();
    f.kind = j.at("kind").get<std::string>();
    f.type = j.at("type").get<std::string>();
    f.rows = j.at("rows").get<std::uint64_t>();
    f.sha256 = j.at("sha256").get<std::string>();
    return f;
}

inline nlohmann::json to_json(const Manifest& m) {
    nlohmann::json j;
    j["format_version"] = Manifest::kFormatVersion;
    j["batch_size"] = m.batch_size;
    j["compression"] = compression_name(m.compression);
    j["height_min"] = m.height_min;
    j["height_max"] = m.height_max;
    if (m.tip_height_at_extraction) j["tip_height_at_extraction"] = *m.tip_height_at_extraction;
    j["batches"] = nlohmann::json::array();
    for (const auto& b : m.batches) {
        nlohmann::json jb;
        jb["index"] = b.index;
        jb["height_lo"] = b.height_lo;
        jb["height_hi"] = b.height_hi;
        jb["files"] = nlohmann::json::array();
        for (const auto& f : b.files) jb["files"].push_back(to_json(f));
        j["batches"].push_back(std::move(jb));
    }
    if (m.dedup) {
        nlohmann::json jd;
        jd["files"] = nlohmann::json::array();
        for (const auto& f : m.dedup->files) jd["files"].push_back(to_json(f));
        jd["ledger"] = m.dedup->ledger_path;
        jd["conflicts_path"] = m.dedup->conflicts_path;
        jd["conflicts"] = m.dedup->conflicts;
        j["dedup"] = std::move(jd);
    }
    return j;
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    if (j.at("format_version").get<int>() != Manifest::kFormatVersion) {
        throw ParseError("unsupported manifest format version");
    }
    m.batch_size = j.at("batch_size").get<std::uint64_t>();
    auto comp = compression_from_name(j.at("compression").get<std::string>());
    if (!comp) throw ParseError("unknown manifest compression");
    m.compression = *comp;
    m.height_min = j.at("height_min").get<std::uint64_t>();
    m.height_max = j.at("height_max").get<std::uint64_t>();
    if (j.contains("tip_height_at_extraction")) {
        m.tip_height_at_extraction = j["tip_height_at_extraction"].get<std::uint64_t>();
    }
    for (const auto& jb : j.at("batches")) {
        BatchEntry b;
        b.index = jb.at("index").get<std::uint64_t>();
        b.height_lo = jb.at("height_lo").get<std::uint64_t>();
        b.height_hi = jb.at("height_hi").get<std::uint64_t>();
        for (const auto& jf : jb.at("files")) b.files.push_back(file_entry_from_json(jf));
        m.batches.push_back(std::move(b));
    }
    if (j.contains("dedup")) {
        DedupState d;
        for (const auto& jf : j["dedup"].at("files")) d.files.push_back(file_entry_from_json(jf));
        d.ledger_path = j["dedup"].at("ledger").get<std::string>();
        d.conflicts_path = j["dedup"].at("conflicts_path").get<std::string>();
        d.conflicts = j["dedup"].at("conflicts").get<std::uint64_t>();
        m.dedup = std::move(d);
    }
    return m;
}

inline void save_manifest(const Manifest& m, const std::filesystem::path& dir) {
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write manifest in " + dir.string());
    out << to_json(m).dump(2) << '\n';
    if (!out.flush()) throw Error("write error on manifest in " + dir.string());
}

inline Manifest load_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json", std::ios::binary);
    if (!in) throw NotFoundError("no manifest.json in " + dir.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("manifest parse error: ") + e.what(),
                         static_cast<std::int64_t>(e.byte));
    }
    return manifest_from_json(j);
}

}  // namespace chaingraph
