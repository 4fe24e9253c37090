#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quadforms {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation left the domain of a function (ln of a non-positive real
/// part, division by a non-invertible number, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Syntax or binding error in expression text. `offset` is the byte
/// offset of the offending token in the source string.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

} // namespace quadforms
