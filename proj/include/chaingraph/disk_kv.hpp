#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "chaingraph/digest.hpp"
#include "chaingraph/errors.hpp"

namespace chaingraph {

// On-disk open-addressing hash table from string keys to a u64 value, used
// for first-seen indexes that must not live in memory. Keys are stored as
// 128-bit fingerprints; slots are probed directly in the file, so resident
// memory stays constant regardless of entry count. Grows by rewriting into a
// table twice the size once 70% full.
class DiskKv {
public:
    static constexpr std::uint64_t kMagic = 0x6b76316b76316b76ULL;

    struct Header {
        std::uint64_t magic = kMagic;
        std::uint64_t slot_count = 0;
        std::uint64_t used = 0;
        std::uint64_t reserved = 0;
    };

    struct Slot {
        std::uint64_t key_hi = 0;
        std::uint64_t key_lo = 0;
        std::uint64_t value = 0;
    };

    DiskKv() = default;

    static DiskKv create(const std::filesystem::path& path, std::uint64_t initial_slots = 1 << 12) {
        DiskKv kv;
        kv.path_ = path;
        kv.fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0644);
        if (kv.fd_ < 0) throw Error("cannot create kv file " + path.string());
        kv.header_.slot_count = initial_slots;
        kv.header_.used = 0;
        kv.write_header();
        kv.zero_slots();
        return kv;
    }

    static DiskKv open(const std::filesystem::path& path) {
        DiskKv kv;
        kv.path_ = path;
        kv.fd_ = ::open(path.c_str(), O_RDWR);
        if (kv.fd_ < 0) throw NotFoundError("cannot open kv file " + path.string());
        unsigned char buf[sizeof(Header)];
        kv.read_at(buf, sizeof(buf), 0);
        std::memcpy(&kv.header_, buf, sizeof(Header));
        if (kv.header_.magic != kMagic) throw CorruptionError("bad kv magic in " + path.string());
        return kv;
    }

    ~DiskKv() {
        if (fd_ >= 0) {
            if (dirty_) write_header();
            ::close(fd_);
        }
    }

    DiskKv(DiskKv&& other) noexcept { *this = std::move(other); }
    DiskKv& operator=(DiskKv&& other) noexcept {
        if (this != &other) {
            if (fd_ >= 0) {
                if (dirty_) write_header();
                ::close(fd_);
            }
            fd_ = other.fd_;
            header_ = other.header_;
            path_ = std::move(other.path_);
            dirty_ = other.dirty_;
            other.fd_ = -1;
        }
        return *this;
    }

    void flush() {
        if (fd_ >= 0 && dirty_) {
            write_header();
            dirty_ = false;
        }
    }
    DiskKv(const DiskKv&) = delete;
    DiskKv& operator=(const DiskKv&) = delete;

    // Inserts key->value if absent. Returns the pre-existing value when the
    // key was already present, nullopt when the insert happened.
    std::optional<std::uint64_t> insert_if_absent(std::string_view key, std::uint64_t value) {
        maybe_grow();
        Key128 k = key128(key);
        std::uint64_t idx = k.hi % header_.slot_count;
        while (true) {
            Slot s = read_slot(idx);
            if (s.key_hi == 0 && s.key_lo == 0) {
                write_slot(idx, Slot{k.hi, k.lo, value});
                ++header_.used;
                dirty_ = true;
                return std::nullopt;
            }
            if (s.key_hi == k.hi && s.key_lo == k.lo) return s.value;
            idx = (idx + 1) % header_.slot_count;
        }
    }

    std::optional<std::uint64_t> get(std::string_view key) const {
        Key128 k = key128(key);
        std::uint64_t idx = k.hi % header_.slot_count;
        while (true) {
            Slot s = read_slot(idx);
            if (s.key_hi == 0 && s.key_lo == 0) return std::nullopt;
            if (s.key_hi == k.hi && s.key_lo == k.lo) return s.value;
            idx = (idx + 1) % header_.slot_count;
        }
    }

    bool contains(std::string_view key) const { return get(key).has_value(); }

    std::uint64_t size() const { return header_.used; }
    const std::filesystem::path& path() const { return path_; }

    // Caller-owned scalar persisted in the header (e.g. a height cursor).
    std::uint64_t aux() const { return header_.reserved; }
    void set_aux(std::uint64_t v) {
        header_.reserved = v;
        dirty_ = true;
    }

private:
    void maybe_grow() {
        if (header_.used * 10 < header_.slot_count * 7) return;
        // Rewrite into a table twice the size (compaction).
        std::filesystem::path tmp = path_;
        tmp += ".grow";
        DiskKv bigger;
        bigger.path_ = tmp;
        bigger.fd_ = ::open(tmp.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0644);
        if (bigger.fd_ < 0) throw Error("cannot grow kv file " + path_.string());
        bigger.header_.slot_count = header_.slot_count * 2;
        bigger.write_header();
        bigger.zero_slots();
        for (std::uint64_t i = 0; i < header_.slot_count; ++i) {
            Slot s = read_slot(i);
            if (s.key_hi == 0 && s.key_lo == 0) continue;
            std::uint64_t idx = s.key_hi % bigger.header_.slot_count;
            while (true) {
                Slot t = bigger.read_slot(idx);
                if (t.key_hi == 0 && t.key_lo == 0) {
                    bigger.write_slot(idx, s);
                    ++bigger.header_.used;
                    break;
                }
                idx = (idx + 1) % bigger.header_.slot_count;
            }
        }
        bigger.write_header();
        ::close(fd_);
        std::filesystem::rename(tmp, path_);
        fd_ = bigger.fd_;
        header_ = bigger.header_;
        dirty_ = false;
        bigger.fd_ = -1;
    }

    void zero_slots() {
        static const char zeros[1 << 16] = {};
        std::uint64_t bytes = header_.slot_count * sizeof(Slot);
        std::uint64_t off = sizeof(Header);
        while (bytes > 0) {
            std::size_t chunk = std::min<std::uint64_t>(bytes, sizeof(zeros));
            write_at(zeros, chunk, off);
            off += chunk;
            bytes -= chunk;
        }
    }

    Slot read_slot(std::uint64_t idx) const {
        unsigned char buf[sizeof(Slot)];
        read_at(buf, sizeof(buf), sizeof(Header) + idx * sizeof(Slot));
        Slot s;
        std::memcpy(&s, buf, sizeof(Slot));
        return s;
    }

    void write_slot(std::uint64_t idx, const Slot& s) {
        unsigned char buf[sizeof(Slot)];
        std::memcpy(buf, &s, sizeof(Slot));
        write_at(buf, sizeof(buf), sizeof(Header) + idx * sizeof(Slot));
    }

    void write_header() {
        unsigned char buf[sizeof(Header)];
        std::memcpy(buf, &header_, sizeof(Header));
        write_at(buf, sizeof(buf), 0);
    }

    void read_at(void* buf, std::size_t n, std::uint64_t off) const {
        if (::pread(fd_, buf, n, static_cast<off_t>(off)) != static_cast<ssize_t>(n)) {
            throw CorruptionError("short read on kv file " + path_.string());
        }
    }

    void write_at(const void* buf, std::size_t n, std::uint64_t off) {
        if (::pwrite(fd_, buf, n, static_cast<off_t>(off)) != static_cast<ssize_t>(n)) {
            throw Error("write error on kv file " + path_.string());
        }
    }

    int fd_ = -1;
    Header header_;
    std::filesystem::path path_;
    bool dirty_ = false;
};

}  // namespace chaingraph
