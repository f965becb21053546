#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>

#include "chaingraph/errors.hpp"
#include "chaingraph/json_block.hpp"
#include "chaingraph/records.hpp"
#include "chaingraph/util.hpp"

namespace chaingraph {

struct RestConfig {
    std::string endpoint = "http://127.0.0.1:8332";
    int timeout_seconds = 30;
    int max_retries = 3;
    std::chrono::milliseconds retry_backoff{250};
};

// Client for the node's REST interface:
//   GET {endpoint}/rest/blockhashbyheight/{h}.hex  -> plain-text block hash
//   GET {endpoint}/rest/block/{hash}.json          -> verbose block JSON
// Transport failures retry with backoff; 404s surface as NotFoundError.
class NodeRestClient {
public:
    explicit NodeRestClient(RestConfig cfg) : cfg_(std::move(cfg)), client_(cfg_.endpoint) {
        client_.set_connection_timeout(cfg_.timeout_seconds);
        client_.set_read_timeout(cfg_.timeout_seconds);
        client_.set_keep_alive(true);
    }

    std::string get_block_hash(std::uint64_t height) {
        std::string body = get("/rest/blockhashbyheight/" + std::to_string(height) + ".hex",
                               "block height " + std::to_string(height));
        // Body is the hash followed by a newline.
        while (!body.empty() && (body.back() == '\n' || body.back() == '\r' || body.back() == ' ')) {
            body.pop_back();
        }
        std::string hash = to_lower(body);
        if (hash.size() != 64 || !is_hex_string(hash)) {
            throw ParseError("endpoint returned malformed block hash '" + body + "'");
        }
        return hash;
    }

    BlockRecord get_block(const std::string& hash) {
        std::string body = get("/rest/block/" + hash + ".json", "block " + hash);
        return parse_block_json(body);
    }

    BlockRecord get_block_at(std::uint64_t height) {
        return get_block(get_block_hash(height));
    }

    // Chain tip height from /rest/chaininfo.json; nullopt if the node does
    // not expose it.
    std::optional<std::uint64_t> tip_height() {
        try {
            std::string body = get("/rest/chaininfo.json", "chain info");
            json info = parse_json_raw_decimals(body);
            if (auto it = info.find("blocks"); it != info.end() && it->is_number()) {
                return it->get<std::uint64_t>();
            }
        } catch (const Error&) {
        }
        return std::nullopt;
    }

private:
    std::string get(const std::string& path, const std::string& what) {
        for (int attempt = 0;; ++attempt) {
            httplib::Result res = client_.Get(path);
            if (res) {
                if (res->status == 200) return res->body;
                if (res->status == 404) throw NotFoundError(what + " not found at endpoint");
                throw TransportError("HTTP " + std::to_string(res->status) + " fetching " + what,
                                     res->status >= 500);
            }
            if (attempt >= cfg_.max_retries) {
                throw TransportError("cannot reach endpoint " + cfg_.endpoint + " fetching " + what +
                                     " (" + httplib::to_string(res.error()) + ")");
            }
            std::this_thread::sleep_for(cfg_.retry_backoff * (attempt + 1));
        }
    }

    RestConfig cfg_;
    httplib::Client client_;
};

}  // namespace chaingraph
