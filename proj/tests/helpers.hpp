#pragma once

// Shared test utilities: temp dirs, synthetic block builders, the node-schema
// JSON emitter for fixture directories, and an exact-rational rounding oracle
// kept independent of the library's value-math path.

#include <unistd.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "chaingraph/amount.hpp"
#include "chaingraph/records.hpp"
#include "chaingraph/script.hpp"
#include "chaingraph/util.hpp"
#include "chaingraph/value_math.hpp"

namespace testutil {

using chaingraph::Amount;
using chaingraph::BlockRecord;
using chaingraph::ScriptBytes;
using chaingraph::TxInRecord;
using chaingraph::TxOutRecord;
using chaingraph::TxRecord;

class TempDir {
public:
    explicit TempDir(const std::string& label) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("chaingraph-test-" + label + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// --- independent rounding oracle -------------------------------------------
// Round-half-away-from-zero of num/den evaluated with boost cpp_int floor
// division, structurally different from the library implementation.

using BigInt = boost::multiprecision::cpp_int;

inline std::int64_t oracle_round_ratio(BigInt num, BigInt den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    bool negative = num < 0;
    if (negative) num = -num;
    BigInt whole = num / den;
    BigInt rem = num % den;
    if (rem * 2 >= den) whole += 1;
    if (negative) whole = -whole;
    return whole.convert_to<std::int64_t>();
}

// --- synthetic identifiers ---------------------------------------------------

inline std::string synth_txid(std::uint64_t a, std::uint64_t b = 0) {
    char buf[65];
    std::snprintf(buf, sizeof(buf), "%016llx%016llx%016llx%016llx",
                  static_cast<unsigned long long>(a), static_cast<unsigned long long>(b),
                  static_cast<unsigned long long>(a ^ 0x5a5a5a5a5a5a5a5aULL),
                  static_cast<unsigned long long>(b ^ 0xc3c3c3c3c3c3c3c3ULL));
    return buf;
}

inline std::string synth_block_hash(std::uint64_t height) {
    char buf[65];
    std::snprintf(buf, sizeof(buf), "%08x%056llx", 0u, static_cast<unsigned long long>(height));
    return buf;
}

// P2PKH script over a repeated fill byte; address included unless omitted.
inline ScriptBytes p2pkh_script(std::uint8_t fill, bool with_address = true,
                                bool with_type = true) {
    std::vector<std::uint8_t> h160(20, fill);
    ScriptBytes s;
    s.hex = "76a914" + chaingraph::hex_encode(h160) + "88ac";
    if (with_address) s.address = chaingraph::base58check_encode(0x00, h160);
    if (with_type) s.type_tag = "pubkeyhash";
    return s;
}

inline ScriptBytes nonstandard_script(const std::string& hex = "51515193") {
    ScriptBytes s;
    s.hex = hex;
    s.type_tag = "nonstandard";
    return s;
}

// --- record builders ---------------------------------------------------------

inline TxOutRecord make_out(Amount value, std::uint32_t n, ScriptBytes script) {
    return TxOutRecord{value, n, std::move(script)};
}

inline TxInRecord make_in(std::string prev_txid, std::uint32_t idx, Amount value,
                          std::uint64_t height, ScriptBytes script, bool generated = false) {
    TxInRecord in;
    in.prev_txid = std::move(prev_txid);
    in.prev_vout_index = idx;
    in.prevout_value = value;
    in.prevout_height = height;
    in.prevout_generated = generated;
    in.prevout_script = std::move(script);
    return in;
}

inline TxRecord make_coinbase(std::string txid, std::vector<TxOutRecord> outs) {
    TxRecord t;
    t.txid = std::move(txid);
    t.size_bytes = 135;
    t.vsize = 135;
    t.weight_units = 540;
    t.version = "1";
    TxInRecord in;
    in.is_coinbase = true;
    t.vin.push_back(in);
    t.vout = std::move(outs);
    return t;
}

inline TxRecord make_tx(std::string txid, std::vector<TxInRecord> ins,
                        std::vector<TxOutRecord> outs, Amount fee) {
    TxRecord t;
    t.txid = std::move(txid);
    t.size_bytes = 250;
    t.vsize = 250;
    t.weight_units = 1000;
    t.version = "1";
    t.vin = std::move(ins);
    t.vout = std::move(outs);
    t.fee = fee;
    return t;
}

inline BlockRecord make_block(std::uint64_t height, std::vector<TxRecord> txs) {
    BlockRecord b;
    b.height = height;
    b.hash = synth_block_hash(height);
    b.time = 1231006505 + static_cast<std::int64_t>(height) * 600;
    b.median_time = b.time - 3600;
    b.difficulty = 1.0;
    b.n_tx = txs.size();
    b.size_bytes = 300 * txs.size();
    b.stripped_size_bytes = 300 * txs.size();
    b.weight_units = 1200 * txs.size();
    b.txs = std::move(txs);
    return b;
}

// Coinbase-only block claiming subsidy exactly (plus supplied fees).
inline BlockRecord make_empty_block(std::uint64_t height, Amount claimed,
                                    ScriptBytes miner = p2pkh_script(0x99)) {
    return make_block(height, {make_coinbase(synth_txid(height, 0xc0),
                                             {make_out(claimed, 0, std::move(miner))})});
}

// --- node-schema JSON emitter ------------------------------------------------
// Values are rendered as exact eight-decimal tokens so fixture files exercise
// the same decimal path as node responses.

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

inline std::string script_to_json(const ScriptBytes& s) {
    std::string j = "{\"hex\": \"" + json_escape(s.hex) + "\"";
    if (s.address) j += ", \"address\": \"" + json_escape(*s.address) + "\"";
    if (s.type_tag) j += ", \"type\": \"" + json_escape(*s.type_tag) + "\"";
    return j + "}";
}

inline std::string block_to_json(const BlockRecord& b) {
    using chaingraph::format_btc;
    std::string j = "{\n";
    j += "\"hash\": \"" + b.hash + "\",\n";
    j += "\"height\": " + std::to_string(b.height) + ",\n";
    j += "\"time\": " + std::to_string(b.time) + ",\n";
    j += "\"mediantime\": " + std::to_string(b.median_time) + ",\n";
    char diff[64];
    std::snprintf(diff, sizeof(diff), "%.17g", b.difficulty);
    j += std::string("\"difficulty\": ") + diff + ",\n";
    j += "\"nTx\": " + std::to_string(b.n_tx) + ",\n";
    j += "\"size\": " + std::to_string(b.size_bytes) + ",\n";
    j += "\"strippedsize\": " + std::to_string(b.stripped_size_bytes) + ",\n";
    j += "\"weight\": " + std::to_string(b.weight_units) + ",\n";
    j += "\"tx\": [\n";
    for (std::size_t ti = 0; ti < b.txs.size(); ++ti) {
        const TxRecord& t = b.txs[ti];
        j += "{\"txid\": \"" + t.txid + "\", \"version\": " + t.version +
             ", \"size\": " + std::to_string(t.size_bytes) +
             ", \"vsize\": " + std::to_string(t.vsize) +
             ", \"weight\": " + std::to_string(t.weight_units) +
             ", \"locktime\": " + std::to_string(t.lock_time) + ",\n";
        j += "\"vin\": [";
        for (std::size_t i = 0; i < t.vin.size(); ++i) {
            const TxInRecord& in = t.vin[i];
            if (i) j += ", ";
            if (in.is_coinbase) {
                j += "{\"coinbase\": \"04ffff001d\", \"sequence\": 4294967295}";
            } else {
                j += "{\"txid\": \"" + in.prev_txid + "\", \"vout\": " +
                     std::to_string(in.prev_vout_index) + ", \"prevout\": {\"generated\": " +
                     (in.prevout_generated ? "true" : "false") +
                     ", \"height\": " + std::to_string(in.prevout_height) +
                     ", \"value\": " + format_btc(in.prevout_value) +
                     ", \"scriptPubKey\": " + script_to_json(in.prevout_script) + "}}";
            }
        }
        j += "],\n\"vout\": [";
        for (std::size_t o = 0; o < t.vout.size(); ++o) {
            const TxOutRecord& out = t.vout[o];
            if (o) j += ", ";
            j += "{\"value\": " + format_btc(out.value) + ", \"n\": " + std::to_string(out.index_n) +
                 ", \"scriptPubKey\": " + script_to_json(out.script) + "}";
        }
        j += "]";
        if (ti > 0) j += ",\n\"fee\": " + format_btc(t.fee);
        j += "}";
        if (ti + 1 < b.txs.size()) j += ",";
        j += "\n";
    }
    j += "]\n}\n";
    return j;
}

inline void write_fixture(const std::filesystem::path& dir, const BlockRecord& b) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / (std::to_string(b.height) + ".json"), std::ios::binary);
    out << block_to_json(b);
}

inline void write_fixture_chain(const std::filesystem::path& dir,
                                const std::vector<BlockRecord>& blocks) {
    for (const auto& b : blocks) write_fixture(dir, b);
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

// --- randomized chains -------------------------------------------------------

struct RandomChainOptions {
    std::uint64_t first_height = 0;
    std::uint64_t blocks = 10;
    unsigned max_txs = 4;       // non-coinbase per block
    unsigned max_ins = 3;
    unsigned max_outs = 3;
    bool allow_zero_fee = true;
};

// Value-conserving random chain: every non-coinbase transaction spends fresh
// synthetic prevouts; the coinbase claims subsidy plus fees.
inline std::vector<BlockRecord> random_chain(std::mt19937_64& rng, const RandomChainOptions& opt) {
    std::vector<BlockRecord> chain;
    std::uint64_t tx_counter = 1;
    for (std::uint64_t k = 0; k < opt.blocks; ++k) {
        std::uint64_t h = opt.first_height + k;
        std::vector<TxRecord> txs;
        txs.push_back(TxRecord{});  // placeholder for coinbase
        unsigned n_tx = static_cast<unsigned>(rng() % (opt.max_txs + 1));
        Amount fees = 0;
        for (unsigned t = 0; t < n_tx; ++t) {
            unsigned n_in = 1 + static_cast<unsigned>(rng() % opt.max_ins);
            unsigned n_out = 1 + static_cast<unsigned>(rng() % opt.max_outs);
            std::vector<TxInRecord> ins;
            Amount total_in = 0;
            for (unsigned i = 0; i < n_in; ++i) {
                Amount v = static_cast<Amount>(1 + rng() % 1'000'000'000);
                total_in += v;
                std::uint64_t ph = h == opt.first_height ? h : opt.first_height + rng() % (k + 1);
                ins.push_back(make_in(synth_txid(0xdead, tx_counter * 100 + i), i % 4, v, ph,
                                      p2pkh_script(static_cast<std::uint8_t>(rng() % 7))));
            }
            Amount fee = opt.allow_zero_fee && rng() % 4 == 0
                             ? 0
                             : static_cast<Amount>(rng() % (total_in / 2 + 1));
            Amount remaining = total_in - fee;
            std::vector<TxOutRecord> outs;
            for (unsigned o = 0; o < n_out; ++o) {
                Amount v = o + 1 == n_out ? remaining
                                          : static_cast<Amount>(rng() % (remaining + 1));
                remaining -= v;
                outs.push_back(make_out(v, o, p2pkh_script(static_cast<std::uint8_t>(rng() % 7))));
            }
            fees += fee;
            txs.push_back(make_tx(synth_txid(h, ++tx_counter), std::move(ins), std::move(outs), fee));
        }
        Amount claimed = chaingraph::block_subsidy(h) + fees;
        txs[0] = make_coinbase(synth_txid(h, 0xc0),
                               {make_out(claimed, 0, p2pkh_script(0x99))});
        chain.push_back(make_block(h, std::move(txs)));
    }
    return chain;
}

}  // namespace testutil
