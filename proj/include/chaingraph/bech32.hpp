#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chaingraph {

// Bech32 (witness v0) and bech32m (v1+) segwit address encoding.
namespace bech32 {

inline constexpr char kCharset[] = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";
inline constexpr std::uint32_t kBech32Const = 1;
inline constexpr std::uint32_t kBech32mConst = 0x2bc830a3;

inline std::uint32_t polymod(const std::vector<std::uint8_t>& values) {
    static constexpr std::uint32_t kGen[] = {0x3b6a57b2, 0x26508e6d, 0x1ea119fa, 0x3d4233dd, 0x2a1462b3};
    std::uint32_t chk = 1;
    for (std::uint8_t v : values) {
        std::uint8_t top = static_cast<std::uint8_t>(chk >> 25);
        chk = (chk & 0x1ffffff) << 5 ^ v;
        for (int i = 0; i < 5; ++i) {
            if (top >> i & 1) chk ^= kGen[i];
        }
    }
    return chk;
}

inline std::vector<std::uint8_t> expand_hrp(const std::string& hrp) {
    std::vector<std::uint8_t> out;
    out.reserve(hrp.size() * 2 + 1);
    for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) >> 5);
    out.push_back(0);
    for (char c : hrp) out.push_back(static_cast<std::uint8_t>(c) & 31);
    return out;
}

// Regroups 8-bit bytes into 5-bit symbols, padding the tail.
inline std::vector<std::uint8_t> to_base32(const std::vector<std::uint8_t>& bytes) {
    std::vector<std::uint8_t> out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (std::uint8_t b : bytes) {
        acc = acc << 8 | b;
        bits += 8;
        while (bits >= 5) {
            bits -= 5;
            out.push_back(static_cast<std::uint8_t>(acc >> bits & 31));
        }
    }
    if (bits > 0) out.push_back(static_cast<std::uint8_t>(acc << (5 - bits) & 31));
    return out;
}

inline std::string encode(const std::string& hrp, const std::vector<std::uint8_t>& data5,
                          std::uint32_t checksum_const) {
    std::vector<std::uint8_t> values = expand_hrp(hrp);
    values.insert(values.end(), data5.begin(), data5.end());
    values.insert(values.end(), 6, 0);
    std::uint32_t mod = polymod(values) ^ checksum_const;

    std::string out = hrp + '1';
    for (std::uint8_t d : data5) out.push_back(kCharset[d]);
    for (int i = 0; i < 6; ++i) out.push_back(kCharset[mod >> (5 * (5 - i)) & 31]);
    return out;
}

}  // namespace bech32

// Segwit address for (witness version, program); bech32 for v0, bech32m above.
inline std::string segwit_address(const std::string& hrp, int witness_version,
                                  const std::vector<std::uint8_t>& program) {
    std::vector<std::uint8_t> data;
    data.push_back(static_cast<std::uint8_t>(witness_version));
    std::vector<std::uint8_t> prog5 = bech32::to_base32(program);
    data.insert(data.end(), prog5.begin(), prog5.end());
    return bech32::encode(hrp, data,
                          witness_version == 0 ? bech32::kBech32Const : bech32::kBech32mConst);
}

}  // namespace chaingraph
