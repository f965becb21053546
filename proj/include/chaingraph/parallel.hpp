#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace chaingraph {

// Runs fn(i) for i in [0, count) on a worker pool and hands results back in
// index order through pull(). In-flight work is capped by `window`, so memory
// stays bounded no matter how uneven the per-item cost is. An exception from
// fn(i) is rethrown from pull() at position i and the pipeline drains.
template <typename T>
class OrderedParallel {
public:
    OrderedParallel(std::uint64_t count, unsigned workers, std::uint64_t window,
                    std::function<T(std::uint64_t)> fn)
        : count_(count), window_(window == 0 ? 1 : window), fn_(std::move(fn)) {
        if (workers == 0) workers = 1;
        workers_.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            workers_.emplace_back([this] { work(); });
        }
    }

    ~OrderedParallel() {
        {
            std::lock_guard lock(mu_);
            aborted_ = true;
        }
        cv_space_.notify_all();
        for (auto& t : workers_) t.join();
    }

    OrderedParallel(const OrderedParallel&) = delete;
    OrderedParallel& operator=(const OrderedParallel&) = delete;

    // Next result in index order; nullopt once the sequence is exhausted.
    std::optional<T> pull() {
        std::unique_lock lock(mu_);
        if (next_emit_ >= count_) return std::nullopt;
        cv_ready_.wait(lock, [this] {
            return done_.count(next_emit_) != 0 || failed_.count(next_emit_) != 0;
        });
        if (auto it = failed_.find(next_emit_); it != failed_.end()) {
            std::exception_ptr ep = it->second;
            aborted_ = true;
            cv_space_.notify_all();
            std::rethrow_exception(ep);
        }
        auto node = done_.extract(next_emit_);
        ++next_emit_;
        cv_space_.notify_all();
        return std::move(node.mapped());
    }

private:
    void work() {
        while (true) {
            std::uint64_t idx;
            {
                std::unique_lock lock(mu_);
                cv_space_.wait(lock, [this] {
                    return aborted_ || (next_claim_ < count_ && next_claim_ < next_emit_ + window_);
                });
                if (aborted_ || next_claim_ >= count_) return;
                idx = next_claim_++;
            }
            try {
                T value = fn_(idx);
                std::lock_guard lock(mu_);
                done_.emplace(idx, std::move(value));
            } catch (...) {
                std::lock_guard lock(mu_);
                failed_.emplace(idx, std::current_exception());
            }
            cv_ready_.notify_all();
        }
    }

    const std::uint64_t count_;
    const std::uint64_t window_;
    std::function<T(std::uint64_t)> fn_;

    std::mutex mu_;
    std::condition_variable cv_ready_;
    std::condition_variable cv_space_;
    std::map<std::uint64_t, T> done_;
    std::map<std::uint64_t, std::exception_ptr> failed_;
    std::uint64_t next_claim_ = 0;
    std::uint64_t next_emit_ = 0;
    bool aborted_ = false;

    std::vector<std::thread> workers_;
};

inline unsigned default_parallelism() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

}  // namespace chaingraph
