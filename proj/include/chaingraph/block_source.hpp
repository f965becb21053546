#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "chaingraph/errors.hpp"
#include "chaingraph/json_block.hpp"
#include "chaingraph/parallel.hpp"
#include "chaingraph/records.hpp"
#include "chaingraph/rest_client.hpp"

namespace chaingraph {

// Ordered stream of BlockRecords over a height range. Both implementations
// emit strictly ascending heights h_lo..h_hi with no gaps.
class BlockSource {
public:
    virtual ~BlockSource() = default;
    virtual std::optional<BlockRecord> next() = 0;
    // Chain tip as seen at the start of the run, when the source knows it.
    virtual std::optional<std::uint64_t> tip_height() const { return std::nullopt; }
};

// Reads {dir}/{height}.json fixture files written in the node's block JSON
// schema. A missing height inside the range is an error naming that height.
class FixtureSource final : public BlockSource {
public:
    FixtureSource(std::filesystem::path dir, std::uint64_t h_lo, std::uint64_t h_hi)
        : dir_(std::move(dir)), next_(h_lo), h_hi_(h_hi) {
        if (h_lo > h_hi) {
            throw SequencingError("empty range: h_lo " + std::to_string(h_lo) + " > h_hi " +
                                  std::to_string(h_hi));
        }
        if (!std::filesystem::is_directory(dir_)) {
            throw NotFoundError("fixture directory " + dir_.string() + " does not exist");
        }
    }

    std::optional<BlockRecord> next() override {
        if (next_ > h_hi_) return std::nullopt;
        std::uint64_t h = next_++;
        BlockRecord b = load_fixture_block(dir_, h);
        if (b.height != h) {
            throw SequencingError("fixture " + std::to_string(h) + ".json declares height " +
                                  std::to_string(b.height));
        }
        return b;
    }

    std::optional<std::uint64_t> tip_height() const override {
        // The highest fixture present stands in for the chain tip.
        std::optional<std::uint64_t> tip;
        for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
            try {
                std::uint64_t h = std::stoull(entry.path().stem().string());
                if (!tip || h > *tip) tip = h;
            } catch (const std::exception&) {
            }
        }
        return tip;
    }

    static BlockRecord load_fixture_block(const std::filesystem::path& dir, std::uint64_t height) {
        std::filesystem::path file = dir / (std::to_string(height) + ".json");
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            throw NotFoundError("missing block fixture for height " + std::to_string(height) +
                                " (" + file.string() + ")");
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_block_json(buf.str());
    }

private:
    std::filesystem::path dir_;
    std::uint64_t next_;
    std::uint64_t h_hi_;
};

// Fetches blocks from the node REST endpoint with the two-step
// hash-then-block request per height. Fetches are pipelined over a bounded
// prefetch window; emission order stays strictly ascending.
class RestSource final : public BlockSource {
public:
    RestSource(RestConfig cfg, std::uint64_t h_lo, std::uint64_t h_hi, unsigned prefetch = 4)
        : client_(std::make_shared<NodeRestClient>(cfg)) {
        if (h_lo > h_hi) {
            throw SequencingError("empty range: h_lo " + std::to_string(h_lo) + " > h_hi " +
                                  std::to_string(h_hi));
        }
        tip_ = client_->tip_height();
        auto client = client_;
        pipe_ = std::make_unique<OrderedParallel<BlockRecord>>(
            h_hi - h_lo + 1, prefetch, prefetch * 2,
            [client, h_lo](std::uint64_t i) { return client->get_block_at(h_lo + i); });
    }

    std::optional<BlockRecord> next() override { return pipe_->pull(); }

    std::optional<std::uint64_t> tip_height() const override { return tip_; }

private:
    std::shared_ptr<NodeRestClient> client_;
    std::unique_ptr<OrderedParallel<BlockRecord>> pipe_;
    std::optional<std::uint64_t> tip_;
};

}  // namespace chaingraph
