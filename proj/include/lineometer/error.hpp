#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lineometer {

enum class ErrorKind {
    invalid_argument,
    empty_input,
    decode,
    degenerate_constant,
    degenerate_window,
    model_mismatch,
    io,
    missing_series,
    parse,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::decode: return "decode";
    case ErrorKind::degenerate_constant: return "degenerate-constant";
    case ErrorKind::degenerate_window: return "degenerate-window";
    case ErrorKind::model_mismatch: return "model-mismatch";
    case ErrorKind::io: return "io";
    case ErrorKind::missing_series: return "missing-series";
    case ErrorKind::parse: return "parse";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Raised for malformed UTF-8; offset is the index of the first offending byte.
class DecodeError : public Error {
public:
    explicit DecodeError(std::size_t offset)
        : Error(ErrorKind::decode,
                "invalid UTF-8 at byte offset " + std::to_string(offset)),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

namespace detail {
inline void require(bool ok, ErrorKind kind, const std::string& what) {
    if (!ok) throw Error(kind, what);
}
} // namespace detail

} // namespace lineometer
