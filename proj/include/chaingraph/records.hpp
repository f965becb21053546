#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chaingraph/amount.hpp"

namespace chaingraph {

// Locking script of an output, as reported by the node: raw hex plus the
// node-provided address and type tag when present.
struct ScriptBytes {
    std::string hex;
    std::optional<std::string> address;
    std::optional<std::string> type_tag;

    bool operator==(const ScriptBytes&) const = default;
};

struct TxInRecord {
    bool is_coinbase = false;
    // Present iff not coinbase.
    std::string prev_txid;
    std::uint32_t prev_vout_index = 0;
    Amount prevout_value = 0;
    std::uint64_t prevout_height = 0;
    bool prevout_generated = false;  // spends a coinbase output
    ScriptBytes prevout_script;

    bool operator==(const TxInRecord&) const = default;
};

struct TxOutRecord {
    Amount value = 0;
    std::uint32_t index_n = 0;
    ScriptBytes script;

    bool operator==(const TxOutRecord&) const = default;
};

struct TxRecord {
    std::string txid;
    std::uint64_t size_bytes = 0;
    std::uint64_t vsize = 0;
    std::uint64_t weight_units = 0;
    std::string version;
    std::uint64_t lock_time = 0;
    std::vector<TxInRecord> vin;
    std::vector<TxOutRecord> vout;
    Amount fee = 0;  // zero for coinbase

    bool operator==(const TxRecord&) const = default;

    bool is_coinbase() const {
        return !vin.empty() && vin.front().is_coinbase;
    }
    Amount input_total() const {
        Amount sum = 0;
        for (const auto& in : vin) sum += in.prevout_value;
        return sum;
    }
    Amount output_total() const {
        Amount sum = 0;
        for (const auto& out : vout) sum += out.value;
        return sum;
    }
};

struct BlockRecord {
    std::uint64_t height = 0;
    std::string hash;
    std::int64_t time = 0;  // block timestamp, when the source provides it
    std::int64_t median_time = 0;
    double difficulty = 0.0;
    std::uint64_t n_tx = 0;
    std::uint64_t size_bytes = 0;
    std::uint64_t stripped_size_bytes = 0;
    std::uint64_t weight_units = 0;
    std::vector<TxRecord> txs;

    bool operator==(const BlockRecord&) const = default;

    const TxRecord& coinbase() const { return txs.front(); }

    // Sum of fees over all non-coinbase transactions.
    Amount fee_total() const {
        Amount sum = 0;
        for (std::size_t i = 1; i < txs.size(); ++i) sum += txs[i].fee;
        return sum;
    }
};

// A single invariant violation found by validate_block. Violations are data,
// not errors: callers decide whether to reject the block.
struct Violation {
    std::string rule;
    std::string detail;
};

using ValidationReport = std::vector<Violation>;

}  // namespace chaingraph
