#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ccop {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression or problem file. `offset` is a byte offset into the
/// parsed text; line/column are 1-based and 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset, std::size_t line = 0,
               std::size_t column = 0)
        : Error(what), offset_(offset), line_(line), column_(column) {}

    std::size_t offset() const noexcept { return offset_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t offset_;
    std::size_t line_;
    std::size_t column_;
};

/// Evaluation outside the domain of definition (log/sqrt of a bad argument,
/// division by zero). `subterm` is the canonical text of the offending node.
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::string subterm)
        : Error(what + ": " + subterm), subterm_(std::move(subterm)) {}

    const std::string& subterm() const noexcept { return subterm_; }

private:
    std::string subterm_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace ccop
