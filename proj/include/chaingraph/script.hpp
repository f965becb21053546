#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaingraph/base58.hpp"
#include "chaingraph/bech32.hpp"
#include "chaingraph/errors.hpp"
#include "chaingraph/records.hpp"
#include "chaingraph/util.hpp"

namespace chaingraph {

// Closed taxonomy over locking scripts. Every byte string maps to exactly one
// tag; NonStandard is the total fallback.
enum class ScriptType : std::uint8_t {
    P2PK = 0,
    P2PKH,
    P2SH,
    P2WPKH,
    P2WSH,
    P2TR,
    P2MS,
    NullData,
    WitnessUnknown,
    NonStandard,
};

inline constexpr std::size_t kScriptTypeCount = 10;

inline constexpr std::array<const char*, kScriptTypeCount> kScriptTypeNames = {
    "P2PK", "P2PKH", "P2SH", "P2WPKH", "P2WSH", "P2TR", "P2MS", "NullData",
    "WitnessUnknown", "NonStandard",
};

inline const char* script_type_name(ScriptType t) {
    return kScriptTypeNames[static_cast<std::size_t>(t)];
}

inline std::optional<ScriptType> script_type_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kScriptTypeNames.size(); ++i) {
        if (name == kScriptTypeNames[i]) return static_cast<ScriptType>(i);
    }
    return std::nullopt;
}

// Maps the node's scriptPubKey "type" strings onto the taxonomy.
inline std::optional<ScriptType> script_type_from_node_tag(std::string_view tag) {
    if (tag == "pubkey") return ScriptType::P2PK;
    if (tag == "pubkeyhash") return ScriptType::P2PKH;
    if (tag == "scripthash") return ScriptType::P2SH;
    if (tag == "witness_v0_keyhash") return ScriptType::P2WPKH;
    if (tag == "witness_v0_scripthash") return ScriptType::P2WSH;
    if (tag == "witness_v1_taproot") return ScriptType::P2TR;
    if (tag == "multisig") return ScriptType::P2MS;
    if (tag == "nulldata") return ScriptType::NullData;
    if (tag == "witness_unknown") return ScriptType::WitnessUnknown;
    if (tag == "nonstandard") return ScriptType::NonStandard;
    return std::nullopt;
}

namespace detail {

inline bool is_p2pk(const std::vector<std::uint8_t>& s) {
    return (s.size() == 35 && s[0] == 0x21 && s[34] == 0xac) ||
           (s.size() == 67 && s[0] == 0x41 && s[66] == 0xac);
}
inline bool is_p2pkh(const std::vector<std::uint8_t>& s) {
    return s.size() == 25 && s[0] == 0x76 && s[1] == 0xa9 && s[2] == 0x14 && s[23] == 0x88 &&
           s[24] == 0xac;
}
inline bool is_p2sh(const std::vector<std::uint8_t>& s) {
    return s.size() == 23 && s[0] == 0xa9 && s[1] == 0x14 && s[22] == 0x87;
}
inline bool is_p2wpkh(const std::vector<std::uint8_t>& s) {
    return s.size() == 22 && s[0] == 0x00 && s[1] == 0x14;
}
inline bool is_p2wsh(const std::vector<std::uint8_t>& s) {
    return s.size() == 34 && s[0] == 0x00 && s[1] == 0x20;
}
inline bool is_p2tr(const std::vector<std::uint8_t>& s) {
    return s.size() == 34 && s[0] == 0x51 && s[1] == 0x20;
}
// OP_m <pubkey>... OP_n OP_CHECKMULTISIG with compressed/uncompressed keys.
inline bool is_p2ms(const std::vector<std::uint8_t>& s) {
    if (s.size() < 3 || s.back() != 0xae) return false;
    auto is_small_int = [](std::uint8_t op) { return op >= 0x51 && op <= 0x60; };
    if (!is_small_int(s.front()) || !is_small_int(s[s.size() - 2])) return false;
    std::size_t i = 1;
    int keys = 0;
    while (i < s.size() - 2) {
        std::uint8_t push = s[i];
        if (push != 0x21 && push != 0x41) return false;
        i += 1 + push;
        if (i > s.size() - 2) return false;
        ++keys;
    }
    int n = s[s.size() - 2] - 0x50;
    return keys == n && keys >= 1;
}
inline bool is_null_data(const std::vector<std::uint8_t>& s) {
    return !s.empty() && s[0] == 0x6a;
}
// BIP141 shape: version op then a single 2..40 byte push.
inline bool is_witness_program(const std::vector<std::uint8_t>& s) {
    if (s.size() < 4 || s.size() > 42) return false;
    if (s[0] != 0x00 && !(s[0] >= 0x51 && s[0] <= 0x60)) return false;
    return s[1] >= 0x02 && s[1] <= 0x28 && s.size() == static_cast<std::size_t>(s[1]) + 2;
}

}  // namespace detail

// Deterministic classification. Trusts the node's type tag when it maps onto
// the taxonomy, otherwise pattern-matches the raw bytes.
inline ScriptType classify_script(const ScriptBytes& script) {
    if (script.type_tag) {
        if (auto mapped = script_type_from_node_tag(*script.type_tag)) return *mapped;
    }
    if (!script.hex.empty() && !is_hex_string(script.hex)) {
        throw ParseError("undecodable script hex '" + script.hex + "'");
    }
    std::vector<std::uint8_t> bytes = script.hex.empty() ? std::vector<std::uint8_t>{}
                                                         : hex_decode(script.hex);
    using namespace detail;
    if (is_p2pkh(bytes)) return ScriptType::P2PKH;
    if (is_p2sh(bytes)) return ScriptType::P2SH;
    if (is_p2wpkh(bytes)) return ScriptType::P2WPKH;
    if (is_p2wsh(bytes)) return ScriptType::P2WSH;
    if (is_p2tr(bytes)) return ScriptType::P2TR;
    if (is_p2pk(bytes)) return ScriptType::P2PK;
    if (is_p2ms(bytes)) return ScriptType::P2MS;
    if (is_null_data(bytes)) return ScriptType::NullData;
    if (is_witness_program(bytes)) return ScriptType::WitnessUnknown;
    return ScriptType::NonStandard;
}

// Node identity of a script: its address when one exists, otherwise the
// compound "{vout index}-{txid}" form. Equality is equality of the canonical
// string.
struct ScriptId {
    enum class Kind : std::uint8_t { Address, Synthetic };

    Kind kind = Kind::Synthetic;
    std::string text;  // canonical form

    bool operator==(const ScriptId&) const = default;

    static ScriptId address(std::string addr) {
        return ScriptId{Kind::Address, std::move(addr)};
    }
    static ScriptId synthetic(std::uint32_t out_index, const std::string& txid) {
        return ScriptId{Kind::Synthetic, std::to_string(out_index) + "-" + txid};
    }
};

// Mainnet encoding constants.
inline constexpr std::uint8_t kP2pkhVersion = 0x00;
inline constexpr std::uint8_t kP2shVersion = 0x05;
inline constexpr const char* kSegwitHrp = "bc";

// Derives an address from the script bytes for the standard hash-carrying
// encodings. Scripts that do not embed their own hash (bare pubkeys,
// multisig, data carriers) have no address here.
inline std::optional<std::string> derive_address_from_script(const ScriptBytes& script) {
    if (script.hex.empty() || !is_hex_string(script.hex)) return std::nullopt;
    std::vector<std::uint8_t> bytes = hex_decode(script.hex);
    using namespace detail;
    auto slice = [&](std::size_t from, std::size_t len) {
        return std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(from),
                                         bytes.begin() + static_cast<std::ptrdiff_t>(from + len));
    };
    if (is_p2pkh(bytes)) return base58check_encode(kP2pkhVersion, slice(3, 20));
    if (is_p2sh(bytes)) return base58check_encode(kP2shVersion, slice(2, 20));
    if (is_p2wpkh(bytes)) return segwit_address(kSegwitHrp, 0, slice(2, 20));
    if (is_p2wsh(bytes)) return segwit_address(kSegwitHrp, 0, slice(2, 32));
    if (is_p2tr(bytes)) return segwit_address(kSegwitHrp, 1, slice(2, 32));
    return std::nullopt;
}

// Identity resolution order: node-supplied address, locally derived address,
// synthetic compound ID. Bech32 addresses are normalized to lowercase;
// base58 is case-significant and kept byte-exact.
inline ScriptId derive_script_id(const ScriptBytes& script, std::uint32_t out_index,
                                 const std::string& txid) {
    if (script.address && !script.address->empty()) {
        std::string addr = *script.address;
        if (addr.size() > 3 && (to_lower(addr.substr(0, 3)) == "bc1" || to_lower(addr.substr(0, 3)) == "tb1")) {
            addr = to_lower(addr);
        }
        return ScriptId::address(std::move(addr));
    }
    if (auto derived = derive_address_from_script(script)) {
        return ScriptId::address(std::move(*derived));
    }
    return ScriptId::synthetic(out_index, txid);
}

inline ScriptId derive_script_id(const TxOutRecord& out, const std::string& txid) {
    return derive_script_id(out.script, out.index_n, txid);
}

}  // namespace chaingraph
