#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qpp::csv {

/// Shortest decimal string that round-trips to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);
double parse_double(std::string_view text);

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

/// Reads comma-separated rows with RFC 4180 quoting. The first row is the
/// header and must match `expected_header` exactly.
class Reader {
public:
  Reader(std::istream& in, std::string source, const std::vector<std::string>& expected_header);

  /// Next data row, or nullopt at end of input. Throws InputError when the
  /// row has the wrong number of fields.
  std::optional<std::vector<std::string>> next();
  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

  [[noreturn]] void fail(std::string_view message) const;

private:
  std::optional<std::vector<std::string>> read_row();

  std::istream& in_;
  std::string source_;
  std::size_t columns_;
  std::size_t line_ = 0;
};

} // namespace qpp::csv
