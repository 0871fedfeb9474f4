#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heirag::csv {

/// Minimal RFC 4180 reader: comma separated, double-quote quoting with ""
/// escapes, quoted fields may span lines. CRLF and LF line endings.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Blank lines are skipped.
  bool next(std::vector<std::string>& fields);

  /// 1-based line on which the last returned record started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t next_line_ = 1;
  std::size_t record_line_ = 0;
};

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

/// Shortest representation that parses back to the same double.
std::string format_number(double value);

/// Strict parse of a whole field as a double (no trailing garbage).
std::optional<double> parse_number(std::string_view field);

/// Strict parse of a whole field as a signed 64-bit integer.
std::optional<long long> parse_integer(std::string_view field);

/// Maps header names to positions and checks required columns.
class Header {
 public:
  explicit Header(std::vector<std::string> names);

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws SchemaError naming the column when absent.
  std::size_t require(std::string_view name) const;
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

std::string_view trim(std::string_view s);

}  // namespace heirag::csv
