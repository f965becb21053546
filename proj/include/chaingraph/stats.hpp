#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "chaingraph/addr_index.hpp"
#include "chaingraph/amount.hpp"
#include "chaingraph/errors.hpp"
#include "chaingraph/graph_build.hpp"
#include "chaingraph/records.hpp"
#include "chaingraph/script.hpp"
#include "chaingraph/value_math.hpp"

namespace chaingraph {

// min/max/avg/sum over a per-block population; absent for empty populations
// (empty blocks have no transfer transactions to summarize).
template <typename T>
struct Summary {
    bool present = false;
    T min = 0;
    T max = 0;
    T sum = 0;
    double avg = 0.0;

    void accumulate(T v) {
        if (!present) {
            present = true;
            min = max = v;
            sum = v;
        } else {
            min = std::min(min, v);
            max = std::max(max, v);
            sum += v;
        }
    }
    void finalize(std::uint64_t count) {
        if (present && count > 0) avg = static_cast<double>(sum) / static_cast<double>(count);
    }
};

struct DormancyStats {
    bool present = false;
    double avg = 0.0;
    double median = 0.0;
    std::uint64_t min = 0;
    std::uint64_t max = 0;
};

struct BlockStats {
    std::uint64_t height = 0;
    std::uint64_t tx_count = 0;
    bool is_empty = false;

    // Per non-coinbase transaction: input and output counts.
    Summary<std::uint64_t> txin_count;
    Summary<std::uint64_t> txout_count;
    // Per individual TxIn / TxOut of non-coinbase transactions.
    Summary<Amount> txin_value;
    Summary<Amount> txout_value;

    std::uint64_t addr_total = 0;
    std::uint64_t addr_unique = 0;
    std::uint64_t addr_new = 0;

    // TxIn-prevout plus TxOut scripts across all transactions.
    std::array<std::uint64_t, kScriptTypeCount> script_type_counts{};

    Amount fee_total = 0;
    Amount minted = 0;
    Amount unclaimed = 0;
    Amount residual_total = 0;

    DormancyStats dormancy;
    // Spent previously-minted coins (prevouts flagged as generated).
    std::uint64_t minted_spent_count = 0;
    Amount minted_spent_value = 0;
    DormancyStats minted_spend_age;
};

// Reward short of subsidy plus fees; such value is permanently lost.
inline Amount unclaimed_reward(const BlockRecord& b) {
    Amount claimed = b.coinbase().output_total();
    Amount ceiling = block_subsidy(b.height) + b.fee_total();
    if (claimed > ceiling) {
        throw InvariantError("block " + std::to_string(b.height) + " claims " +
                             std::to_string(claimed) + " sat, above subsidy + fees " +
                             std::to_string(ceiling));
    }
    return ceiling - claimed;
}

namespace detail {

inline DormancyStats dormancy_from_ages(std::vector<std::uint64_t> ages) {
    DormancyStats d;
    if (ages.empty()) return d;
    d.present = true;
    std::sort(ages.begin(), ages.end());
    d.min = ages.front();
    d.max = ages.back();
    long double sum = 0;
    for (auto a : ages) sum += a;
    d.avg = static_cast<double>(sum / ages.size());
    std::size_t n = ages.size();
    d.median = n % 2 == 1 ? static_cast<double>(ages[n / 2])
                          : (static_cast<double>(ages[n / 2 - 1]) + static_cast<double>(ages[n / 2])) / 2.0;
    return d;
}

}  // namespace detail

// Ages of the TxOut spent in this block: spend height minus creation height,
// zero for same-block spends. Coinbase inputs reference nothing and are
// excluded; spends of previously minted coins are reported separately.
inline DormancyStats coin_dormancy(const BlockRecord& b) {
    std::vector<std::uint64_t> ages;
    for (std::size_t i = 1; i < b.txs.size(); ++i) {
        for (const auto& in : b.txs[i].vin) {
            if (in.is_coinbase) continue;
            if (in.prevout_height > b.height) {
                throw InvariantError("tx " + b.txs[i].txid + " spends an output created at height " +
                                     std::to_string(in.prevout_height) + " > " +
                                     std::to_string(b.height));
            }
            ages.push_back(b.height - in.prevout_height);
        }
    }
    return detail::dormancy_from_ages(std::move(ages));
}

// All per-block statistics. The first-seen index must be positioned exactly
// at this block's height.
inline BlockStats per_block_stats(const BlockRecord& b, AddressIndex& addr_index) {
    addr_index.begin_block(b.height);

    BlockStats s;
    s.height = b.height;
    s.tx_count = b.txs.size();
    s.is_empty = b.txs.size() == 1;
    s.fee_total = b.fee_total();

    Amount claimed = b.coinbase().output_total();
    Amount subsidy = block_subsidy(b.height);
    s.unclaimed = unclaimed_reward(b);
    s.minted = std::min(subsidy, std::max<Amount>(claimed - s.fee_total, 0));

    std::vector<std::uint64_t> ages;
    std::vector<std::uint64_t> minted_ages;
    std::unordered_set<std::string> unique_addrs;

    auto register_script = [&](const ScriptBytes& script, std::uint32_t index,
                               const std::string& txid) {
        ++s.script_type_counts[static_cast<std::size_t>(classify_script(script))];
        ScriptId sid = derive_script_id(script, index, txid);
        if (sid.kind != ScriptId::Kind::Address) return;
        ++s.addr_total;
        if (unique_addrs.insert(sid.text).second) {
            ++s.addr_unique;
            if (addr_index.register_address(sid.text, b.height)) ++s.addr_new;
        }
    };

    std::uint64_t txin_entries = 0;
    std::uint64_t txout_entries = 0;
    for (std::size_t ti = 0; ti < b.txs.size(); ++ti) {
        const TxRecord& t = b.txs[ti];
        for (const auto& out : t.vout) register_script(out.script, out.index_n, t.txid);
        if (ti == 0) continue;  // coinbase input references nothing

        s.residual_total += residual(t);
        s.txin_count.accumulate(t.vin.size());
        s.txout_count.accumulate(t.vout.size());
        for (const auto& out : t.vout) {
            s.txout_value.accumulate(out.value);
            ++txout_entries;
        }
        for (const auto& in : t.vin) {
            if (in.is_coinbase) continue;
            register_script(in.prevout_script, in.prev_vout_index, in.prev_txid);
            s.txin_value.accumulate(in.prevout_value);
            ++txin_entries;
            std::uint64_t age = b.height - in.prevout_height;
            ages.push_back(age);
            if (in.prevout_generated) {
                ++s.minted_spent_count;
                s.minted_spent_value += in.prevout_value;
                minted_ages.push_back(age);
            }
        }
    }
    std::uint64_t transfer_txs = b.txs.size() - 1;
    s.txin_count.finalize(transfer_txs);
    s.txout_count.finalize(transfer_txs);
    s.txin_value.finalize(txin_entries);
    s.txout_value.finalize(txout_entries);
    s.dormancy = detail::dormancy_from_ages(std::move(ages));
    s.minted_spend_age = detail::dormancy_from_ages(std::move(minted_ages));

    addr_index.end_block(b.height);
    return s;
}

// Median of the last 11 block timestamps (all available near genesis): the
// middle element of the sorted list, upper middle for even counts.
inline std::int64_t median_time_past(std::vector<std::int64_t> timestamps) {
    if (timestamps.empty()) throw InvariantError("median_time_past: no timestamps");
    std::sort(timestamps.begin(), timestamps.end());
    return timestamps[timestamps.size() / 2];
}

// Residual bookkeeping across a block stream. Buckets follow the lost-funds
// breakdown: at most 1 satoshi, above that up to 1 BTC, above 1 BTC.
struct ResidualScan {
    struct PerBlock {
        std::uint64_t height = 0;
        Amount total = 0;
    };
    std::vector<PerBlock> per_block;
    std::vector<std::uint64_t> flagged;  // heights with positive residual
    std::array<std::uint64_t, 3> buckets{};
    Amount global_sum = 0;

    static std::size_t bucket_of(Amount x) {
        if (x <= 1) return 0;        // 0 < x <= 1e-8 BTC
        if (x <= kCoin) return 1;    // 1e-8 < x <= 1 BTC
        return 2;                    // x > 1 BTC
    }

    void add(const BlockRecord& b) {
        Amount total = 0;
        for (std::size_t i = 1; i < b.txs.size(); ++i) {
            Amount r = residual(b.txs[i]);
            if (r > 0) {
                ++buckets[bucket_of(r)];
                total += r;
            }
        }
        per_block.push_back({b.height, total});
        if (total > 0) flagged.push_back(b.height);
        global_sum += total;
    }
};

// Trailing-window arithmetic mean; entries before the window fills use the
// available prefix.
inline std::vector<double> rolling_mean(const std::vector<double>& series, std::size_t window) {
    if (window < 1) throw InvariantError("rolling_mean: window must be >= 1");
    std::vector<double> out(series.size());
    long double acc = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        acc += series[i];
        if (i >= window) acc -= series[i - window];
        std::size_t len = std::min(i + 1, window);
        out[i] = static_cast<double>(acc / static_cast<long double>(len));
    }
    return out;
}

// Pearson correlation, single pass over co-moments.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) {
        throw InvariantError("pearson: series must be non-empty and equally sized");
    }
    long double mean_x = 0, mean_y = 0, m2x = 0, m2y = 0, cov = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double n = static_cast<long double>(i + 1);
        long double dx = x[i] - mean_x;
        long double dy = y[i] - mean_y;
        mean_x += dx / n;
        mean_y += dy / n;
        m2x += dx * (x[i] - mean_x);
        m2y += dy * (y[i] - mean_y);
        cov += dx * (y[i] - mean_y);
    }
    if (m2x == 0 || m2y == 0) throw InvariantError("pearson: zero variance");
    return static_cast<double>(cov / std::sqrt(m2x * m2y));
}

// Script-type counts for one block, in the two universes the share plots can
// be read as: outputs only, and inputs plus outputs.
struct ScriptTypeShare {
    std::array<std::uint64_t, kScriptTypeCount> txout_counts{};
    std::array<std::uint64_t, kScriptTypeCount> txin_txout_counts{};

    static std::array<double, kScriptTypeCount> fractions(
        const std::array<std::uint64_t, kScriptTypeCount>& counts) {
        std::array<double, kScriptTypeCount> f{};
        std::uint64_t total = 0;
        for (auto c : counts) total += c;
        if (total == 0) return f;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            f[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
        }
        return f;
    }
};

inline ScriptTypeShare script_type_share(const BlockRecord& b) {
    ScriptTypeShare s;
    for (std::size_t ti = 0; ti < b.txs.size(); ++ti) {
        const TxRecord& t = b.txs[ti];
        for (const auto& out : t.vout) {
            auto type = static_cast<std::size_t>(classify_script(out.script));
            ++s.txout_counts[type];
            ++s.txin_txout_counts[type];
        }
        for (const auto& in : t.vin) {
            if (in.is_coinbase) continue;
            ++s.txin_txout_counts[static_cast<std::size_t>(classify_script(in.prevout_script))];
        }
    }
    return s;
}

}  // namespace chaingraph
