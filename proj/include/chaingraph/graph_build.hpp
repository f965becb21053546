#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chaingraph/errors.hpp"
#include "chaingraph/graph.hpp"
#include "chaingraph/records.hpp"
#include "chaingraph/script.hpp"
#include "chaingraph/value_math.hpp"

namespace chaingraph {

struct ValueSplitConfig {
    TransferDenominator transfer_denominator_mode = TransferDenominator::AsPrinted;
    int max_inout_threshold = 20;
    bool skip_zero_value = true;
    // Off: one Tx->Tx transfer edge per referenced output (parallel edges).
    // On: one edge per source tx, valued at the sum of referenced outputs.
    bool aggregate_tx_inputs = false;
};

// Unaccounted value in a transaction: inputs minus outputs minus fee.
// Positive residual is value permanently lost; negative violates conservation.
inline Amount residual(const TxRecord& tx) {
    if (tx.is_coinbase()) throw InvariantError("residual: coinbase transaction");
    Amount r = tx.input_total() - tx.output_total() - tx.fee;
    if (r < 0) {
        throw InvariantError("tx " + tx.txid + ": negative residual " + std::to_string(r) + " sat");
    }
    return r;
}

// Dropped entirely when both sides exceed the threshold; such transactions
// would create enormous bipartite cliques.
inline bool tx_excluded_by_size(const TxRecord& tx, const ValueSplitConfig& cfg) {
    return tx.vin.size() > static_cast<std::size_t>(cfg.max_inout_threshold) &&
           tx.vout.size() > static_cast<std::size_t>(cfg.max_inout_threshold);
}

inline bool tx_is_zero_value(const TxRecord& tx) {
    for (const auto& out : tx.vout) {
        if (out.value != 0) return false;
    }
    return true;
}

struct BuildResult {
    BlockGraph graph;
    // Claimed reward short of subsidy + fees; permanently lost.
    Amount unclaimed = 0;
    // Minted coins actually claimed this block (min of subsidy and
    // claimed-minus-fees, floored at zero).
    Amount minted = 0;
    std::vector<std::string> warnings;
};

namespace detail {

// Every Script/Tx Transfers-or-Fee edge gets a block-context mirror of equal
// value: source->Redeems->Block plus Block->Credits->Script or
// Block->Confirms->Tx on the target side.
inline void add_with_mirrors(BlockGraph& g, EdgeRecord e) {
    const NodeRef block = NodeRef::block(g.height);
    EdgeRecord redeems{e.src, block, EdgeType::Redeems, e.value, e.height};
    EdgeRecord context{block,
                       e.dst,
                       e.dst.kind == NodeKind::Script ? EdgeType::Credits : EdgeType::Confirms,
                       e.value,
                       e.height};
    g.add_edge(std::move(e));
    g.add_edge(std::move(redeems));
    g.add_edge(std::move(context));
}

inline TxNodeProps tx_props(const TxRecord& t) {
    return TxNodeProps{t.size_bytes, t.vsize, t.weight_units, t.version, t.lock_time, false};
}

}  // namespace detail

// Renders one block as a graph: minted coins from the Coinbase node, fee and
// transfer bipartites between scripts, transaction-level flow edges, and the
// block-context mirrors. Pure function of (record, config); callers should
// run validate_block first.
inline BuildResult build_block_graph(const BlockRecord& b, const ValueSplitConfig& cfg = {}) {
    if (b.txs.empty() || !b.txs.front().is_coinbase()) {
        throw InvariantError("block " + std::to_string(b.height) + ": missing coinbase transaction");
    }

    BuildResult result;
    BlockGraph& g = result.graph;
    g.height = b.height;
    g.block_node = BlockNodeProps{b.height, b.median_time,      b.difficulty,  b.n_tx,
                                  b.size_bytes, b.stripped_size_bytes, b.weight_units};
    g.add_coinbase_node();

    const std::uint64_t h = b.height;
    const TxRecord& coinbase = b.coinbase();
    const std::string& coinbase_txid = coinbase.txid;

    // Fees from every non-coinbase transaction count toward the minted-coin
    // computation, including transactions excluded from the graph below.
    const Amount fee_total = b.fee_total();
    const Amount claimed_total = coinbase.output_total();
    const Amount subsidy = block_subsidy(h);
    result.minted = std::min(subsidy, std::max<Amount>(claimed_total - fee_total, 0));
    result.unclaimed = subsidy + fee_total - claimed_total;
    if (result.unclaimed < 0) {
        throw InvariantError("block " + std::to_string(h) + ": coinbase claims " +
                             std::to_string(claimed_total) + " sat, more than subsidy + fees");
    }

    g.add_tx_node(coinbase_txid, detail::tx_props(coinbase));
    if (claimed_total > 0) {
        for (const auto& out : coinbase.vout) {
            ScriptId sid = derive_script_id(out, coinbase_txid);
            g.add_script_node(sid.text, ScriptNodeProps{classify_script(out.script)});
            g.add_edge({NodeRef::coinbase(), NodeRef::script(sid), EdgeType::Mints,
                        mint_edge_value(result.minted, out.value, claimed_total), h});
        }
    }
    // Exactly one minted-coins edge to the transaction node per block; a
    // fully unclaimed reward still leaves this zero-valued marker.
    g.add_edge({NodeRef::coinbase(), NodeRef::tx(coinbase_txid), EdgeType::Mints, result.minted, h});

    for (std::size_t ti = 1; ti < b.txs.size(); ++ti) {
        const TxRecord& t = b.txs[ti];
        try {
            if (tx_excluded_by_size(t, cfg)) continue;
            if (cfg.skip_zero_value && tx_is_zero_value(t)) continue;

            g.add_tx_node(t.txid, detail::tx_props(t));
            const NodeRef tx_node = NodeRef::tx(t.txid);
            const Amount sum_inputs = t.input_total();

            // Transaction-level transfers from each referenced producing tx.
            if (cfg.aggregate_tx_inputs) {
                std::vector<std::pair<std::string, Amount>> per_source;
                for (const auto& in : t.vin) {
                    auto it = std::find_if(per_source.begin(), per_source.end(),
                                           [&](const auto& p) { return p.first == in.prev_txid; });
                    if (it == per_source.end()) {
                        per_source.emplace_back(in.prev_txid, in.prevout_value);
                    } else {
                        it->second += in.prevout_value;
                    }
                }
                for (const auto& [src_txid, value] : per_source) {
                    g.add_tx_node(src_txid, TxNodeProps{.stub = true});
                    detail::add_with_mirrors(
                        g, {NodeRef::tx(src_txid), tx_node, EdgeType::Transfers, value, h});
                }
            } else {
                for (const auto& in : t.vin) {
                    g.add_tx_node(in.prev_txid, TxNodeProps{.stub = true});
                    detail::add_with_mirrors(
                        g, {NodeRef::tx(in.prev_txid), tx_node, EdgeType::Transfers,
                            in.prevout_value, h});
                }
            }

            // Script-level transfer bipartite: every input script to every
            // output script, parallel edges preserved.
            std::vector<ScriptId> in_sids;
            in_sids.reserve(t.vin.size());
            for (const auto& in : t.vin) {
                ScriptId sid = derive_script_id(in.prevout_script, in.prev_vout_index, in.prev_txid);
                g.add_script_node(sid.text, ScriptNodeProps{classify_script(in.prevout_script)});
                in_sids.push_back(std::move(sid));
            }
            std::vector<ScriptId> out_sids;
            out_sids.reserve(t.vout.size());
            for (const auto& out : t.vout) {
                ScriptId sid = derive_script_id(out, t.txid);
                g.add_script_node(sid.text, ScriptNodeProps{classify_script(out.script)});
                out_sids.push_back(std::move(sid));
            }

            Amount transfer_den = cfg.transfer_denominator_mode == TransferDenominator::AsPrinted
                                      ? sum_inputs - t.fee
                                      : sum_inputs;
            if (transfer_den <= 0) {
                result.warnings.push_back("block " + std::to_string(h) + " tx " + t.txid +
                                          ": degenerate transfer denominator " +
                                          std::to_string(transfer_den) + ", transfer edges skipped");
            } else {
                for (std::size_t i = 0; i < t.vin.size(); ++i) {
                    for (std::size_t o = 0; o < t.vout.size(); ++o) {
                        Amount value = transfer_edge_value(t.vout[o].value, t.vin[i].prevout_value,
                                                           sum_inputs, t.fee,
                                                           cfg.transfer_denominator_mode);
                        detail::add_with_mirrors(g, {NodeRef::script(in_sids[i]),
                                                     NodeRef::script(out_sids[o]),
                                                     EdgeType::Transfers, value, h});
                    }
                }
            }

            // Fee edges exist only when there is a fee and a claimed reward
            // to route it through.
            if (t.fee > 0 && claimed_total > 0) {
                detail::add_with_mirrors(g, {tx_node, NodeRef::tx(coinbase_txid), EdgeType::Fee,
                                             t.fee, h});
                for (std::size_t i = 0; i < t.vin.size(); ++i) {
                    for (const auto& miner_out : coinbase.vout) {
                        ScriptId miner_sid = derive_script_id(miner_out, coinbase_txid);
                        Amount value = fee_edge_value(t.fee, t.vin[i].prevout_value, sum_inputs,
                                                      miner_out.value, claimed_total);
                        detail::add_with_mirrors(g, {NodeRef::script(in_sids[i]),
                                                     NodeRef::script(miner_sid), EdgeType::Fee,
                                                     value, h});
                    }
                }
            }
        } catch (const Error& e) {
            throw InvariantError("block " + std::to_string(h) + " tx " + t.txid + ": " + e.what());
        }
    }
    return result;
}

}  // namespace chaingraph
