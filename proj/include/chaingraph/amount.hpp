#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "chaingraph/errors.hpp"

namespace chaingraph {

// The only monetary representation used in computation: integer satoshis.
using Amount = std::int64_t;

inline constexpr Amount kCoin = 100'000'000;  // satoshis per BTC
inline constexpr int kBtcDecimals = 8;

// Parses a decimal BTC string ("52.01", "0.00000001", "3.5e1") into exact
// satoshis. Digit-by-digit; no floating point anywhere on this path, so the
// conversion is lossless for every representable value. More than eight
// effective fraction digits is a precision error, as is anything that does
// not fit a 64-bit satoshi count.
inline Amount parse_btc_decimal(std::string_view s) {
    const std::string_view original = s;
    auto fail = [&](const char* why) -> Amount {
        throw ValuePrecisionError("bad BTC decimal '" + std::string(original) + "': " + why);
    };

    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) fail("empty");

    std::string digits;  // significant digits, no separator
    int frac_len = 0;
    bool seen_dot = false;
    bool seen_digit = false;
    std::size_t i = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (seen_dot) fail("second '.'");
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            seen_digit = true;
            digits.push_back(c);
            if (seen_dot) ++frac_len;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            fail("unexpected character");
        }
    }
    if (!seen_digit) fail("no digits");

    long exponent = 0;
    if (i < s.size()) {  // exponent part
        ++i;
        bool exp_neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            exp_neg = s[i] == '-';
            ++i;
        }
        if (i == s.size()) fail("empty exponent");
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') fail("bad exponent");
            exponent = exponent * 10 + (s[i] - '0');
            if (exponent > 1000) fail("exponent out of range");
        }
        if (exp_neg) exponent = -exponent;
    }

    // Effective number of fraction digits once the exponent is applied.
    long effective_frac = static_cast<long>(frac_len) - exponent;
    if (effective_frac > kBtcDecimals) fail("more than 8 fraction digits");

    // value = digits * 10^(8 - effective_frac), accumulated in satoshis.
    long shift = kBtcDecimals - effective_frac;
    unsigned long long acc = 0;
    const unsigned long long limit =
        static_cast<unsigned long long>(std::numeric_limits<Amount>::max());
    auto push_digit = [&](int d) {
        if (acc > (limit - static_cast<unsigned long long>(d)) / 10) fail("satoshi overflow");
        acc = acc * 10 + static_cast<unsigned long long>(d);
    };
    for (char c : digits) push_digit(c - '0');
    for (long k = 0; k < shift; ++k) push_digit(0);

    Amount value = static_cast<Amount>(acc);
    return negative ? -value : value;
}

// Converts an integer BTC count (JSON integer values) to satoshis.
inline Amount sat_from_btc_int(std::int64_t btc) {
    if (btc > std::numeric_limits<Amount>::max() / kCoin ||
        btc < std::numeric_limits<Amount>::min() / kCoin) {
        throw ValuePrecisionError("BTC integer overflows satoshi range");
    }
    return btc * kCoin;
}

// Canonical decimal rendering: full eight fraction digits, no exponent.
// format_btc(parse_btc_decimal(s)) is the canonical form of any valid s.
inline std::string format_btc(Amount sat) {
    bool negative = sat < 0;
    unsigned long long v = negative ? 0ULL - static_cast<unsigned long long>(sat)
                                    : static_cast<unsigned long long>(sat);
    unsigned long long whole = v / kCoin;
    unsigned long long frac = v % kCoin;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%llu.%08llu", negative ? "-" : "", whole, frac);
    return buf;
}

}  // namespace chaingraph
