#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "chaingraph/disk_kv.hpp"
#include "chaingraph/errors.hpp"

namespace chaingraph {

// Persistent first-seen address index, backed by the on-disk hash table so
// runs over long ranges stay within a constant memory footprint. Blocks must
// register in height order; the header carries the next expected height.
class AddressIndex {
public:
    static AddressIndex create(const std::filesystem::path& path, std::uint64_t first_height) {
        AddressIndex idx;
        idx.kv_ = DiskKv::create(path);
        idx.kv_.set_aux(first_height);
        return idx;
    }

    static AddressIndex open(const std::filesystem::path& path) {
        AddressIndex idx;
        idx.kv_ = DiskKv::open(path);
        return idx;
    }

    std::uint64_t next_height() const { return kv_.aux(); }
    std::uint64_t unique_addresses() const { return kv_.size(); }

    // Begins registering addresses for one block.
    void begin_block(std::uint64_t height) {
        if (height != kv_.aux()) {
            throw SequencingError("address index expects height " + std::to_string(kv_.aux()) +
                                  ", got " + std::to_string(height));
        }
    }

    // True when the address was never seen in any earlier block (it is then
    // recorded with this height).
    bool register_address(std::string_view address, std::uint64_t height) {
        return !kv_.insert_if_absent(address, height).has_value();
    }

    void end_block(std::uint64_t height) {
        kv_.set_aux(height + 1);
        kv_.flush();
    }

private:
    AddressIndex() = default;
    DiskKv kv_;
};

}  // namespace chaingraph
