#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "chaingraph/util.hpp"

namespace chaingraph {

using Sha256Digest = std::array<std::uint8_t, 32>;

inline Sha256Digest sha256(const void* data, std::size_t len) {
    Sha256Digest out{};
    unsigned int out_len = 0;
    EVP_Digest(data, len, out.data(), &out_len, EVP_sha256(), nullptr);
    return out;
}

inline Sha256Digest sha256(std::string_view s) { return sha256(s.data(), s.size()); }

// Double SHA-256, as used by base58check checksums.
inline Sha256Digest sha256d(const void* data, std::size_t len) {
    Sha256Digest first = sha256(data, len);
    return sha256(first.data(), first.size());
}

// Incremental hasher for streaming file digests.
class Sha256Stream {
public:
    Sha256Stream() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr);
    }

    void update(const void* data, std::size_t len) {
        EVP_DigestUpdate(ctx_.get(), data, len);
    }
    void update(std::string_view s) { update(s.data(), s.size()); }

    Sha256Digest finish() {
        Sha256Digest out{};
        unsigned int out_len = 0;
        EVP_DigestFinal_ex(ctx_.get(), out.data(), &out_len);
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string digest_hex(const Sha256Digest& d) {
    return hex_encode(d.data(), d.size());
}

// 128-bit key fingerprint for on-disk hash tables (truncated SHA-256).
struct Key128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    bool operator==(const Key128&) const = default;
    bool is_zero() const { return hi == 0 && lo == 0; }
};

inline Key128 key128(std::string_view s) {
    Sha256Digest d = sha256(s);
    Key128 k;
    for (int i = 0; i < 8; ++i) k.hi = k.hi << 8 | d[i];
    for (int i = 8; i < 16; ++i) k.lo = k.lo << 8 | d[i];
    return k;
}

}  // namespace chaingraph
