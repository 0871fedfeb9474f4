#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace heirag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input row. Carries the 1-based line number and the column name
/// (empty when the whole row is at fault, e.g. wrong arity).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string column, const std::string& what)
      : Error("line " + std::to_string(line) +
              (column.empty() ? std::string() : ", column " + column) + ": " + what),
        line_(line),
        column_(std::move(column)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

/// Table structure problem: missing required column, duplicate key.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Persisted index files disagree with each other or are truncated.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// Configuration document or environment is unusable.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Outbound model call failed (network, timeout, non-2xx).
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Model output violated the response contract or the allowed candidate set.
class GroundingError : public Error {
 public:
  using Error::Error;
};

}  // namespace heirag
