#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mkf {

/// Malformed file contents. Carries the byte offset where decoding failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or mismatched operands, raised before any work is done.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

}  // namespace mkf
