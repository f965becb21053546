#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chaingraph/amount.hpp"
#include "chaingraph/errors.hpp"
#include "chaingraph/records.hpp"
#include "chaingraph/util.hpp"

namespace chaingraph {

using json = nlohmann::json;

namespace detail {

// SAX-to-DOM builder that stores every JSON float as its raw source text.
// Monetary values reach us as decimals ("value": 52.01); routing them through
// a double would corrupt satoshi sums, so they stay strings until parsed
// digit-by-digit.
class RawDecimalSax {
public:
    explicit RawDecimalSax(json& target) : dom_(target, /*allow_exceptions=*/true) {}

    bool null() { return dom_.null(); }
    bool boolean(bool v) { return dom_.boolean(v); }
    bool number_integer(json::number_integer_t v) { return dom_.number_integer(v); }
    bool number_unsigned(json::number_unsigned_t v) { return dom_.number_unsigned(v); }
    bool number_float(json::number_float_t, const std::string& raw) {
        std::string copy = raw;
        return dom_.string(copy);
    }
    bool string(std::string& v) { return dom_.string(v); }
    bool binary(json::binary_t& v) { return dom_.binary(v); }
    bool start_object(std::size_t n) { return dom_.start_object(n); }
    bool key(std::string& v) { return dom_.key(v); }
    bool end_object() { return dom_.end_object(); }
    bool start_array(std::size_t n) { return dom_.start_array(n); }
    bool end_array() { return dom_.end_array(); }
    bool parse_error(std::size_t pos, const std::string&, const nlohmann::detail::exception& ex) {
        throw ParseError(std::string("JSON parse error: ") + ex.what(),
                         static_cast<std::int64_t>(pos));
    }

private:
    nlohmann::detail::json_sax_dom_parser<json> dom_;
};

}  // namespace detail

// Parses JSON text keeping all float literals as raw strings.
inline json parse_json_raw_decimals(std::string_view text) {
    json out;
    detail::RawDecimalSax sax(out);
    try {
        json::sax_parse(text, &sax);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("JSON parse error: ") + e.what(),
                         static_cast<std::int64_t>(e.byte));
    }
    return out;
}

namespace detail {

inline const json& require_key(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError("missing key '" + std::string(key) + "' in " + ctx);
    return *it;
}

inline Amount amount_from(const json& v, const std::string& ctx) {
    if (v.is_string()) return parse_btc_decimal(v.get_ref<const std::string&>());
    if (v.is_number_unsigned()) return sat_from_btc_int(static_cast<std::int64_t>(v.get<std::uint64_t>()));
    if (v.is_number_integer()) return sat_from_btc_int(v.get<std::int64_t>());
    throw ParseError("expected BTC decimal in " + ctx);
}

inline double double_from(const json& v, const std::string& ctx) {
    if (v.is_string()) {
        try {
            return std::stod(v.get_ref<const std::string&>());
        } catch (const std::exception&) {
            throw ParseError("expected number in " + ctx);
        }
    }
    if (v.is_number()) return v.get<double>();
    throw ParseError("expected number in " + ctx);
}

inline std::uint64_t uint_from(const json& v, const std::string& ctx) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        auto x = v.get<std::int64_t>();
        if (x < 0) throw ParseError("negative integer in " + ctx);
        return static_cast<std::uint64_t>(x);
    }
    throw ParseError("expected unsigned integer in " + ctx);
}

inline std::string version_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    return v.dump();
}

inline ScriptBytes script_from(const json& spk, const std::string& ctx) {
    ScriptBytes out;
    out.hex = require_key(spk, "hex", ctx).get<std::string>();
    if (auto it = spk.find("address"); it != spk.end() && it->is_string()) {
        out.address = it->get<std::string>();
    } else if (auto its = spk.find("addresses");
               its != spk.end() && its->is_array() && its->size() == 1 && (*its)[0].is_string()) {
        out.address = (*its)[0].get<std::string>();
    }
    if (auto it = spk.find("type"); it != spk.end() && it->is_string()) {
        out.type_tag = it->get<std::string>();
    }
    return out;
}

}  // namespace detail

// Builds a BlockRecord from the node's block JSON (REST /rest/block/<hash>.json
// shape, verbose transactions with prevout data). Fixture files use the same
// schema, so both sources share this code path.
inline BlockRecord block_from_json(const json& root) {
    using namespace detail;
    BlockRecord b;
    b.hash = to_lower(require_key(root, "hash", "block").get<std::string>());
    b.height = uint_from(require_key(root, "height", "block"), "block.height");
    b.median_time = static_cast<std::int64_t>(uint_from(require_key(root, "mediantime", "block"), "block.mediantime"));
    if (auto it = root.find("time"); it != root.end() && it->is_number()) {
        b.time = static_cast<std::int64_t>(uint_from(*it, "block.time"));
    }
    b.difficulty = double_from(require_key(root, "difficulty", "block"), "block.difficulty");
    b.n_tx = uint_from(require_key(root, "nTx", "block"), "block.nTx");
    b.size_bytes = uint_from(require_key(root, "size", "block"), "block.size");
    b.stripped_size_bytes = uint_from(require_key(root, "strippedsize", "block"), "block.strippedsize");
    b.weight_units = uint_from(require_key(root, "weight", "block"), "block.weight");

    const json& txs = require_key(root, "tx", "block");
    if (!txs.is_array()) throw ParseError("block.tx is not an array");
    b.txs.reserve(txs.size());

    for (std::size_t ti = 0; ti < txs.size(); ++ti) {
        const json& jt = txs[ti];
        const std::string ctx = "tx[" + std::to_string(ti) + "]";
        TxRecord t;
        t.txid = to_lower(require_key(jt, "txid", ctx).get<std::string>());
        t.size_bytes = uint_from(require_key(jt, "size", ctx), ctx + ".size");
        t.vsize = uint_from(require_key(jt, "vsize", ctx), ctx + ".vsize");
        t.weight_units = uint_from(require_key(jt, "weight", ctx), ctx + ".weight");
        t.version = version_string(require_key(jt, "version", ctx));
        t.lock_time = uint_from(require_key(jt, "locktime", ctx), ctx + ".locktime");

        const json& vin = require_key(jt, "vin", ctx);
        for (std::size_t i = 0; i < vin.size(); ++i) {
            const json& ji = vin[i];
            const std::string ictx = ctx + ".vin[" + std::to_string(i) + "]";
            TxInRecord in;
            if (ji.contains("coinbase")) {
                in.is_coinbase = true;
            } else {
                in.prev_txid = to_lower(require_key(ji, "txid", ictx).get<std::string>());
                in.prev_vout_index = static_cast<std::uint32_t>(uint_from(require_key(ji, "vout", ictx), ictx + ".vout"));
                const json& prev = require_key(ji, "prevout", ictx);
                in.prevout_value = amount_from(require_key(prev, "value", ictx), ictx + ".prevout.value");
                in.prevout_height = uint_from(require_key(prev, "height", ictx), ictx + ".prevout.height");
                if (auto g = prev.find("generated"); g != prev.end() && g->is_boolean()) {
                    in.prevout_generated = g->get<bool>();
                }
                in.prevout_script = script_from(require_key(prev, "scriptPubKey", ictx), ictx + ".prevout.scriptPubKey");
            }
            t.vin.push_back(std::move(in));
        }

        const json& vout = require_key(jt, "vout", ctx);
        for (std::size_t i = 0; i < vout.size(); ++i) {
            const json& jo = vout[i];
            const std::string octx = ctx + ".vout[" + std::to_string(i) + "]";
            TxOutRecord out;
            out.value = amount_from(require_key(jo, "value", octx), octx + ".value");
            out.index_n = static_cast<std::uint32_t>(uint_from(require_key(jo, "n", octx), octx + ".n"));
            out.script = script_from(require_key(jo, "scriptPubKey", octx), octx + ".scriptPubKey");
            t.vout.push_back(std::move(out));
        }

        if (auto it = jt.find("fee"); it != jt.end()) {
            t.fee = amount_from(*it, ctx + ".fee");
        } else if (!t.is_coinbase()) {
            // Nodes without fee reporting: derive it from the prevout data.
            t.fee = t.input_total() - t.output_total();
        }
        b.txs.push_back(std::move(t));
    }
    return b;
}

inline BlockRecord parse_block_json(std::string_view text) {
    return block_from_json(parse_json_raw_decimals(text));
}

// Checks the BlockRecord/TxRecord invariants. Violations are data, not
// exceptions; an empty report means the block is well formed.
inline ValidationReport validate_block(const BlockRecord& b) {
    ValidationReport report;
    auto flag = [&](std::string rule, std::string detail) {
        report.push_back({std::move(rule), std::move(detail)});
    };

    if (b.txs.size() != b.n_tx) {
        flag("ntx-mismatch", "nTx=" + std::to_string(b.n_tx) + " but " +
                                 std::to_string(b.txs.size()) + " transactions present");
    }
    if (b.hash.size() != 64 || !is_hex_string(b.hash) || b.hash != to_lower(b.hash)) {
        flag("hash-format", "block hash is not 64-char lowercase hex: " + b.hash);
    }
    if (b.txs.empty()) {
        flag("no-transactions", "block has no transactions");
        return report;
    }

    for (std::size_t i = 0; i < b.txs.size(); ++i) {
        const TxRecord& t = b.txs[i];
        const std::string where = "tx " + t.txid + " (index " + std::to_string(i) + ")";
        if (t.vin.empty()) flag("empty-vin", where);
        if (t.vout.empty()) flag("empty-vout", where);

        bool has_coinbase_input = false;
        for (const auto& in : t.vin) has_coinbase_input |= in.is_coinbase;

        if (i == 0) {
            if (!has_coinbase_input) flag("coinbase-not-first", where + " lacks a coinbase input");
            if (t.vin.size() != 1) flag("coinbase-input-count", where + " has " + std::to_string(t.vin.size()) + " inputs, expected exactly 1");
        } else if (has_coinbase_input) {
            flag("coinbase-duplicate", where + " has a coinbase input but is not first");
        }

        for (std::size_t o = 0; o < t.vout.size(); ++o) {
            if (t.vout[o].index_n != o) {
                flag("vout-index", where + " output " + std::to_string(o) + " claims n=" + std::to_string(t.vout[o].index_n));
            }
            if (t.vout[o].value < 0) flag("negative-value", where + " output " + std::to_string(o));
        }

        if (i > 0) {
            for (const auto& in : t.vin) {
                if (!in.is_coinbase && in.prev_txid.empty()) {
                    flag("missing-prevout", where + " input lacks prevout data");
                }
            }
            if (t.fee < 0) flag("negative-fee", where);
            Amount residual = t.input_total() - t.output_total() - t.fee;
            if (residual < 0) {
                flag("negative-residual", where + " residual " + std::to_string(residual) + " sat");
            }
        }
    }
    return report;
}

}  // namespace chaingraph
