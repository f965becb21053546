#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>

#include "chaingraph/amount.hpp"
#include "chaingraph/errors.hpp"

namespace chaingraph {

// Edge values are exact rationals over satoshi integers with a single
// terminal rounding. 256-bit intermediates cover the worst case of three
// chained satoshi factors without loss.
using Int256 = boost::multiprecision::int256_t;

// Nearest integer to num/den; ties round away from zero (the rounding used
// by Bitcoin Core).
inline Int256 round_half_away_from_zero(const Int256& num, const Int256& den) {
    if (den == 0) throw InvariantError("round_half_away_from_zero: zero denominator");
    Int256 n = num;
    Int256 d = den;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    bool negative = n < 0;
    if (negative) n = -n;
    Int256 q = (2 * n + d) / (2 * d);
    return negative ? -q : q;
}

inline Amount to_amount(const Int256& v) {
    if (v > std::numeric_limits<Amount>::max() || v < std::numeric_limits<Amount>::min()) {
        throw InvariantError("satoshi value out of 64-bit range");
    }
    return static_cast<Amount>(v);
}

inline Amount round_ratio(const Int256& num, const Int256& den) {
    return to_amount(round_half_away_from_zero(num, den));
}

// Protocol subsidy: 50 BTC halved every 210 000 blocks via right shift, zero
// once the shift exhausts the value.
inline Amount block_subsidy(std::uint64_t height) {
    constexpr Amount kInitial = 50 * kCoin;
    std::uint64_t halvings = height / 210'000;
    if (halvings >= 63) return 0;
    return kInitial >> halvings;
}

// Value of a Coinbase->Script minted-coins edge: the output's proportional
// share of the claimed reward.
//   value = minted * paid_to_script / mining_reward
inline Amount mint_edge_value(Amount minted, Amount paid_to_script, Amount mining_reward) {
    if (mining_reward <= 0) throw InvariantError("mint_edge_value: mining reward must be positive");
    if (paid_to_script > mining_reward) {
        throw InvariantError("mint_edge_value: output exceeds mining reward");
    }
    return round_ratio(Int256(minted) * paid_to_script, Int256(mining_reward));
}

// Value of a Script_u -> Fee -> Script_v edge. Composes the input's share of
// the fee with the miner output's share of the claimed reward, as one exact
// rational rounded once:
//   u_fee_share = tx_fee * u_value / max(total_tx_input, 1)
//   e           = round(u_fee_share * v_value / total_paid_to_miner)
inline Amount fee_edge_value(Amount tx_fee, Amount u_value, Amount total_tx_input, Amount v_value,
                             Amount total_paid_to_miner) {
    if (tx_fee < 0) throw InvariantError("fee_edge_value: negative fee");
    if (total_paid_to_miner <= 0) {
        throw InvariantError("fee_edge_value: total paid to miner must be positive");
    }
    Int256 den = Int256(std::max<Amount>(total_tx_input, 1)) * total_paid_to_miner;
    return round_ratio(Int256(tx_fee) * u_value * v_value, den);
}

enum class TransferDenominator : std::uint8_t {
    // value = v_out * u_in / (sum_inputs - fee); a single-input edge can
    // exceed its output value, but the formula is kept verbatim.
    AsPrinted = 0,
    // value = v_out * u_in / sum_inputs; edge sums reconcile with outputs.
    Conserving,
};

// Value of a Script_u -> Transfers -> Script_v edge: the portion of output v
// funded by input u relative to the funds exchanged.
inline Amount transfer_edge_value(Amount v_out_value, Amount u_in_value, Amount sum_inputs,
                                  Amount fee, TransferDenominator mode) {
    Amount den = mode == TransferDenominator::AsPrinted ? sum_inputs - fee : sum_inputs;
    if (den <= 0) {
        throw InvariantError("transfer_edge_value: non-positive denominator (degenerate transaction)");
    }
    return round_ratio(Int256(v_out_value) * u_in_value, Int256(den));
}

}  // namespace chaingraph
