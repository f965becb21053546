#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "chaingraph/errors.hpp"

namespace chaingraph {

// External merge sort over (key, rank, seq, payload) records with a caller
// supplied memory budget. Buffered records spill to sorted runs once the
// budget fills; merge() then streams the global order with a bounded fan-in.
// Byte accounting is coarse (record bytes plus fixed per-record and
// per-reader overhead) and exposed for tests via peak_tracked_bytes().
class ExternalSorter {
public:
    ExternalSorter(std::uint64_t memory_budget_bytes, std::filesystem::path tmp_dir)
        : budget_(std::max<std::uint64_t>(memory_budget_bytes, 1 << 16)),
          tmp_dir_(std::move(tmp_dir)) {
        std::filesystem::create_directories(tmp_dir_);
    }

    ~ExternalSorter() {
        for (const auto& p : runs_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    }

    void add(std::string_view key, std::uint64_t rank, std::string_view payload) {
        Entry e;
        e.key_len = static_cast<std::uint32_t>(key.size());
        e.rank = rank;
        e.seq = next_seq_++;
        e.data.reserve(key.size() + payload.size());
        e.data.assign(key);
        e.data.append(payload);
        tracked_ += e.data.size() + kEntryOverhead;
        peak_ = std::max(peak_, tracked_);
        entries_.push_back(std::move(e));
        if (tracked_ >= budget_) spill();
    }

    using Emit = std::function<void(std::string_view key, std::uint64_t rank,
                                    std::string_view payload)>;

    // Emits all records in (key, rank, seq) order. One-shot.
    void merge(const Emit& emit) {
        if (runs_.empty()) {
            sort_entries();
            for (const Entry& e : entries_) {
                std::string_view data(e.data);
                emit(data.substr(0, e.key_len), e.rank, data.substr(e.key_len));
            }
            release_entries();
            return;
        }
        if (!entries_.empty()) spill();

        // Collapse runs until one merge pass fits the fan-in.
        while (runs_.size() > kFanIn) {
            std::vector<std::filesystem::path> group(runs_.begin(), runs_.begin() + kFanIn);
            runs_.erase(runs_.begin(), runs_.begin() + kFanIn);
            std::filesystem::path merged = next_run_path();
            RunWriter writer(merged);
            merge_group(group, [&](std::string_view key, std::uint64_t rank, std::uint64_t seq,
                                   std::string_view payload) {
                writer.put(key, rank, seq, payload);
            });
            writer.close();
            for (const auto& p : group) std::filesystem::remove(p);
            runs_.push_back(merged);
        }
        std::vector<std::filesystem::path> group = runs_;
        merge_group(group, [&](std::string_view key, std::uint64_t rank, std::uint64_t,
                               std::string_view payload) { emit(key, rank, payload); });
    }

    std::uint64_t peak_tracked_bytes() const { return peak_; }
    std::size_t run_count() const { return runs_.size(); }

private:
    static constexpr std::uint64_t kEntryOverhead = 64;
    static constexpr std::size_t kFanIn = 16;
    static constexpr std::size_t kReadBuffer = 1 << 18;

    struct Entry {
        std::uint32_t key_len = 0;
        std::uint64_t rank = 0;
        std::uint64_t seq = 0;
        std::string data;  // key then payload

        std::string_view key() const { return std::string_view(data).substr(0, key_len); }
    };

    struct EntryLess {
        bool operator()(const Entry& a, const Entry& b) const {
            if (int c = a.key().compare(b.key()); c != 0) return c < 0;
            if (a.rank != b.rank) return a.rank < b.rank;
            return a.seq < b.seq;
        }
    };

    class RunWriter {
    public:
        explicit RunWriter(const std::filesystem::path& path) {
            file_ = std::fopen(path.c_str(), "wb");
            if (!file_) throw Error("cannot open sort run " + path.string());
        }
        ~RunWriter() {
            if (file_) std::fclose(file_);
        }
        void put(std::string_view key, std::uint64_t rank, std::uint64_t seq,
                 std::string_view payload) {
            std::uint32_t kl = static_cast<std::uint32_t>(key.size());
            std::uint32_t pl = static_cast<std::uint32_t>(payload.size());
            write(&kl, sizeof(kl));
            write(&pl, sizeof(pl));
            write(&rank, sizeof(rank));
            write(&seq, sizeof(seq));
            write(key.data(), key.size());
            write(payload.data(), payload.size());
        }
        void close() {
            if (std::fclose(file_) != 0) throw Error("write error on sort run");
            file_ = nullptr;
        }

    private:
        void write(const void* p, std::size_t n) {
            if (n != 0 && std::fwrite(p, 1, n, file_) != n) throw Error("write error on sort run");
        }
        std::FILE* file_ = nullptr;
    };

    class RunReader {
    public:
        explicit RunReader(const std::filesystem::path& path) : path_(path) {
            file_ = std::fopen(path.c_str(), "rb");
            if (!file_) throw Error("cannot reopen sort run " + path.string());
            buffer_.resize(kReadBuffer);
            std::setvbuf(file_, buffer_.data(), _IOFBF, buffer_.size());
            advance();
        }
        ~RunReader() {
            if (file_) std::fclose(file_);
        }
        bool done() const { return done_; }
        const Entry& head() const { return head_; }
        void advance() {
            std::uint32_t kl, pl;
            if (std::fread(&kl, 1, sizeof(kl), file_) != sizeof(kl)) {
                done_ = true;
                return;
            }
            read(&pl, sizeof(pl));
            read(&head_.rank, sizeof(head_.rank));
            read(&head_.seq, sizeof(head_.seq));
            head_.key_len = kl;
            head_.data.resize(static_cast<std::size_t>(kl) + pl);
            read(head_.data.data(), head_.data.size());
        }

    private:
        void read(void* p, std::size_t n) {
            if (n != 0 && std::fread(p, 1, n, file_) != n) {
                throw CorruptionError("truncated sort run " + path_.string());
            }
        }
        std::filesystem::path path_;
        std::FILE* file_ = nullptr;
        std::vector<char> buffer_;
        Entry head_;
        bool done_ = false;
    };

    void sort_entries() { std::sort(entries_.begin(), entries_.end(), EntryLess{}); }

    void release_entries() {
        entries_.clear();
        entries_.shrink_to_fit();
        tracked_ = 0;
    }

    void spill() {
        if (entries_.empty()) return;
        sort_entries();
        std::filesystem::path path = next_run_path();
        RunWriter writer(path);
        for (const Entry& e : entries_) {
            std::string_view data(e.data);
            writer.put(data.substr(0, e.key_len), e.rank, e.seq, data.substr(e.key_len));
        }
        writer.close();
        runs_.push_back(path);
        release_entries();
    }

    std::filesystem::path next_run_path() {
        return tmp_dir_ / ("run-" + std::to_string(run_counter_++) + ".bin");
    }

    template <typename Sink>
    void merge_group(const std::vector<std::filesystem::path>& group, const Sink& sink) {
        std::vector<std::unique_ptr<RunReader>> readers;
        readers.reserve(group.size());
        for (const auto& p : group) readers.push_back(std::make_unique<RunReader>(p));
        std::uint64_t reader_bytes = group.size() * (kReadBuffer + kEntryOverhead);
        peak_ = std::max(peak_, tracked_ + reader_bytes);

        auto greater = [&](std::size_t a, std::size_t b) {
            return EntryLess{}(readers[b]->head(), readers[a]->head());
        };
        std::vector<std::size_t> heap;
        for (std::size_t i = 0; i < readers.size(); ++i) {
            if (!readers[i]->done()) heap.push_back(i);
        }
        std::make_heap(heap.begin(), heap.end(), greater);
        while (!heap.empty()) {
            std::pop_heap(heap.begin(), heap.end(), greater);
            std::size_t idx = heap.back();
            const Entry& e = readers[idx]->head();
            std::string_view data(e.data);
            sink(data.substr(0, e.key_len), e.rank, e.seq, data.substr(e.key_len));
            readers[idx]->advance();
            if (readers[idx]->done()) {
                heap.pop_back();
            } else {
                std::push_heap(heap.begin(), heap.end(), greater);
            }
        }
    }

    std::uint64_t budget_;
    std::filesystem::path tmp_dir_;
    std::vector<Entry> entries_;
    std::vector<std::filesystem::path> runs_;
    std::uint64_t tracked_ = 0;
    std::uint64_t peak_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t run_counter_ = 0;
};

}  // namespace chaingraph
