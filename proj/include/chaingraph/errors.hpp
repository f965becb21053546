#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace chaingraph {

// Exit codes shared by the CLI and the library error types.
// 0 success, 2 transport/parse, 3 sequencing, 4 data invariant violation.
enum class ExitCode : int {
    Ok = 0,
    Failure = 1,
    Transport = 2,
    Sequencing = 3,
    Invariant = 4,
};

class Error : public std::runtime_error {
public:
    explicit Error(std::string msg, ExitCode code = ExitCode::Failure)
        : std::runtime_error(std::move(msg)), code_(code) {}

    ExitCode exit_code() const noexcept { return code_; }

private:
    ExitCode code_;
};

// Network-level failure talking to the node endpoint. Retriable by default.
class TransportError : public Error {
public:
    explicit TransportError(std::string msg, bool retriable = true)
        : Error(std::move(msg), ExitCode::Transport), retriable_(retriable) {}

    bool retriable() const noexcept { return retriable_; }

private:
    bool retriable_;
};

// Requested object (block hash, height, root node, ...) does not exist.
class NotFoundError : public Error {
public:
    explicit NotFoundError(std::string msg)
        : Error(std::move(msg), ExitCode::Transport) {}
};

// Malformed input bytes. Carries a byte offset when one is known.
class ParseError : public Error {
public:
    explicit ParseError(std::string msg, std::int64_t byte_offset = -1)
        : Error(std::move(msg), ExitCode::Transport), byte_offset_(byte_offset) {}

    // -1 when the offset is unknown.
    std::int64_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::int64_t byte_offset_;
};

// A monetary decimal that cannot be represented exactly in satoshis.
class ValuePrecisionError : public ParseError {
public:
    explicit ValuePrecisionError(std::string msg) : ParseError(std::move(msg)) {}
};

// Height gap, overlap, or out-of-order input where an ordered stream is required.
class SequencingError : public Error {
public:
    explicit SequencingError(std::string msg)
        : Error(std::move(msg), ExitCode::Sequencing) {}
};

// Data violates a model invariant (negative residual, overclaimed reward, ...).
class InvariantError : public Error {
public:
    explicit InvariantError(std::string msg)
        : Error(std::move(msg), ExitCode::Invariant) {}
};

// Stored file does not match its recorded digest or is truncated.
class CorruptionError : public Error {
public:
    explicit CorruptionError(std::string msg)
        : Error(std::move(msg), ExitCode::Transport) {}
};

}  // namespace chaingraph
