#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chaingraph/digest.hpp"

namespace chaingraph {

// Base58 encoding over the Bitcoin alphabet (no 0, O, I, l).
inline std::string base58_encode(const std::vector<std::uint8_t>& input) {
    static constexpr char kAlphabet[] = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

    std::size_t zeros = 0;
    while (zeros < input.size() && input[zeros] == 0) ++zeros;

    // Big-number base conversion, one input byte at a time.
    std::vector<std::uint8_t> b58((input.size() - zeros) * 138 / 100 + 1, 0);
    std::size_t length = 0;
    for (std::size_t i = zeros; i < input.size(); ++i) {
        int carry = input[i];
        std::size_t j = 0;
        for (auto it = b58.rbegin(); (carry != 0 || j < length) && it != b58.rend(); ++it, ++j) {
            carry += 256 * (*it);
            *it = static_cast<std::uint8_t>(carry % 58);
            carry /= 58;
        }
        length = j;
    }

    auto it = b58.begin() + static_cast<std::ptrdiff_t>(b58.size() - length);
    while (it != b58.end() && *it == 0) ++it;

    std::string out;
    out.reserve(zeros + static_cast<std::size_t>(b58.end() - it));
    out.assign(zeros, '1');
    for (; it != b58.end(); ++it) out.push_back(kAlphabet[*it]);
    return out;
}

// version || payload || first 4 bytes of sha256d(version || payload)
inline std::string base58check_encode(std::uint8_t version, const std::vector<std::uint8_t>& payload) {
    std::vector<std::uint8_t> data;
    data.reserve(payload.size() + 5);
    data.push_back(version);
    data.insert(data.end(), payload.begin(), payload.end());
    Sha256Digest checksum = sha256d(data.data(), data.size());
    data.insert(data.end(), checksum.begin(), checksum.begin() + 4);
    return base58_encode(data);
}

}  // namespace chaingraph
