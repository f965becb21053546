#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaingraph/digest.hpp"
#include "chaingraph/errors.hpp"

namespace chaingraph {

enum class Compression : std::uint8_t { None = 0, Gzip };

inline const char* compression_name(Compression c) {
    return c == Compression::Gzip ? "gzip" : "none";
}

inline std::optional<Compression> compression_from_name(std::string_view name) {
    if (name == "none") return Compression::None;
    if (name == "gzip") return Compression::Gzip;
    return std::nullopt;
}

inline const char* compression_suffix(Compression c) {
    return c == Compression::Gzip ? ".tsv.gz" : ".tsv";
}

// Writes a text file, optionally gzip-compressed, hashing the bytes as they
// land on disk. The gzip header is emitted by zlib with a zero mtime, so
// identical input always yields identical file bytes.
class FileWriter {
public:
    FileWriter(const std::filesystem::path& path, Compression compression)
        : path_(path), compression_(compression) {
        file_ = std::fopen(path.c_str(), "wb");
        if (!file_) throw Error("cannot open " + path.string() + " for writing");
        if (compression_ == Compression::Gzip) {
            stream_ = std::make_unique<z_stream>();
            stream_->zalloc = Z_NULL;
            stream_->zfree = Z_NULL;
            stream_->opaque = Z_NULL;
            if (deflateInit2(stream_.get(), Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                             Z_DEFAULT_STRATEGY) != Z_OK) {
                std::fclose(file_);
                file_ = nullptr;
                throw Error("deflateInit2 failed for " + path.string());
            }
        }
    }

    ~FileWriter() {
        if (file_) abandon();
    }

    FileWriter(const FileWriter&) = delete;
    FileWriter& operator=(const FileWriter&) = delete;

    void write(std::string_view data) {
        if (compression_ == Compression::Gzip) {
            deflate_chunk(data, Z_NO_FLUSH);
        } else {
            sink(data.data(), data.size());
        }
    }

    struct Result {
        std::uint64_t rows = 0;
        std::string sha256_hex;
    };

    // Flushes, closes, and returns the digest of the on-disk bytes.
    Result close(std::uint64_t rows) {
        if (compression_ == Compression::Gzip) deflate_chunk({}, Z_FINISH);
        Result r{rows, digest_hex(sha_.finish())};
        if (std::fclose(file_) != 0) {
            file_ = nullptr;
            throw Error("write error closing " + path_.string());
        }
        file_ = nullptr;
        if (stream_) deflateEnd(stream_.get());
        stream_.reset();
        return r;
    }

    // Closes and removes the partial file (error-path cleanup).
    void abandon() {
        if (file_) {
            std::fclose(file_);
            file_ = nullptr;
        }
        if (stream_) {
            deflateEnd(stream_.get());
            stream_.reset();
        }
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }

    const std::filesystem::path& path() const { return path_; }

private:
    void sink(const void* data, std::size_t len) {
        sha_.update(data, len);
        if (len != 0 && std::fwrite(data, 1, len, file_) != len) {
            throw Error("write error on " + path_.string());
        }
    }

    void deflate_chunk(std::string_view data, int flush) {
        stream_->next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
        stream_->avail_in = static_cast<uInt>(data.size());
        unsigned char out[1 << 16];
        do {
            stream_->next_out = out;
            stream_->avail_out = sizeof(out);
            int rc = deflate(stream_.get(), flush);
            if (rc == Z_STREAM_ERROR) throw Error("deflate error on " + path_.string());
            sink(out, sizeof(out) - stream_->avail_out);
        } while (stream_->avail_out == 0 || (flush == Z_FINISH && stream_->avail_in > 0));
        if (flush == Z_FINISH) {
            // drain until stream end
            int rc;
            do {
                stream_->next_out = out;
                stream_->avail_out = sizeof(out);
                rc = deflate(stream_.get(), Z_FINISH);
                sink(out, sizeof(out) - stream_->avail_out);
            } while (rc != Z_STREAM_END);
        }
    }

    std::filesystem::path path_;
    Compression compression_;
    std::FILE* file_ = nullptr;
    std::unique_ptr<z_stream> stream_;
    Sha256Stream sha_;
};

// Streaming line reader over plain or gzip files with optional digest
// verification of the raw on-disk bytes at EOF.
class LineReader {
public:
    LineReader(const std::filesystem::path& path, Compression compression,
               std::string expected_sha256_hex = {})
        : path_(path), compression_(compression), expected_(std::move(expected_sha256_hex)) {
        file_ = std::fopen(path.c_str(), "rb");
        if (!file_) throw NotFoundError("cannot open " + path.string());
        if (compression_ == Compression::Gzip) {
            stream_ = std::make_unique<z_stream>();
            stream_->zalloc = Z_NULL;
            stream_->zfree = Z_NULL;
            stream_->opaque = Z_NULL;
            stream_->next_in = Z_NULL;
            stream_->avail_in = 0;
            if (inflateInit2(stream_.get(), 15 + 32) != Z_OK) {
                std::fclose(file_);
                file_ = nullptr;
                throw Error("inflateInit2 failed for " + path.string());
            }
        }
    }

    ~LineReader() {
        if (file_) std::fclose(file_);
        if (stream_) inflateEnd(stream_.get());
    }

    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;

    // Next line without its terminator; nullopt at end of file.
    std::optional<std::string> next_line() {
        while (true) {
            if (auto pos = pending_.find('\n', consumed_); pos != std::string::npos) {
                std::string line = pending_.substr(consumed_, pos - consumed_);
                consumed_ = pos + 1;
                if (consumed_ > pending_.size() / 2 && consumed_ > (1u << 16)) {
                    pending_.erase(0, consumed_);
                    consumed_ = 0;
                }
                return line;
            }
            if (eof_) {
                verify_digest();
                if (consumed_ >= pending_.size()) return std::nullopt;
                std::string line = pending_.substr(consumed_);
                pending_.clear();
                consumed_ = 0;
                return line;  // unterminated final line
            }
            fill();
        }
    }

private:
    void fill() {
        unsigned char raw[1 << 16];
        std::size_t got = std::fread(raw, 1, sizeof(raw), file_);
        if (got == 0) {
            if (std::ferror(file_)) throw Error("read error on " + path_.string());
            eof_ = true;
            if (compression_ == Compression::Gzip && !stream_end_) {
                throw CorruptionError("truncated gzip stream in " + path_.string());
            }
            return;
        }
        sha_.update(raw, got);
        if (compression_ == Compression::None) {
            pending_.append(reinterpret_cast<char*>(raw), got);
            return;
        }
        stream_->next_in = raw;
        stream_->avail_in = static_cast<uInt>(got);
        unsigned char out[1 << 16];
        while (stream_->avail_in > 0 && !stream_end_) {
            stream_->next_out = out;
            stream_->avail_out = sizeof(out);
            int rc = inflate(stream_.get(), Z_NO_FLUSH);
            if (rc == Z_STREAM_END) {
                stream_end_ = true;
            } else if (rc != Z_OK) {
                throw CorruptionError("corrupt gzip data in " + path_.string());
            }
            pending_.append(reinterpret_cast<char*>(out), sizeof(out) - stream_->avail_out);
        }
    }

    void verify_digest() {
        if (verified_ || expected_.empty()) return;
        verified_ = true;
        std::string actual = digest_hex(sha_.finish());
        if (actual != expected_) {
            throw CorruptionError("digest mismatch for " + path_.string() + ": expected " +
                                  expected_ + ", got " + actual);
        }
    }

    std::filesystem::path path_;
    Compression compression_;
    std::string expected_;
    std::FILE* file_ = nullptr;
    std::unique_ptr<z_stream> stream_;
    Sha256Stream sha_;
    std::string pending_;
    std::size_t consumed_ = 0;
    bool eof_ = false;
    bool stream_end_ = false;
    bool verified_ = false;
};

}  // namespace chaingraph
