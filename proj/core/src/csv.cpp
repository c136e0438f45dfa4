#include "qpp/csv.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qpp/error.hpp"

namespace qpp::csv {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  return fmt::format("{}", value);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

double parse_double(std::string_view text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InputError(fmt::format("not a number: '{}'", text));
  }
  return value;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

Reader::Reader(std::istream& in, std::string source, const std::vector<std::string>& expected_header)
    : in_(in), source_(std::move(source)), columns_(expected_header.size()) {
  auto header = read_row();
  if (!header) fail("missing header");
  if (!header->empty() && !(*header)[0].empty() && (*header)[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    (*header)[0].erase(0, 3);
  }
  if (*header != expected_header) {
    fail(fmt::format("unexpected header '{}', expected '{}'", join(*header), join(expected_header)));
  }
}

std::optional<std::vector<std::string>> Reader::next() {
  while (true) {
    auto row = read_row();
    if (!row) return std::nullopt;
    if (row->size() == 1 && (*row)[0].empty()) continue; // blank line
    if (row->size() != columns_) {
      fail(fmt::format("expected {} fields, found {}", columns_, row->size()));
    }
    return row;
  }
}

void Reader::fail(std::string_view message) const {
  throw InputError(fmt::format("{}:{}: {}", source_, line_, message));
}

std::optional<std::vector<std::string>> Reader::read_row() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields(1);
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (!quoted) break;
      // a quoted field continues on the next physical line
      if (!std::getline(in_, line)) fail("unterminated quoted field");
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      fields.back().push_back('\n');
      i = 0;
      continue;
    }
    const char c = line[i++];
    if (quoted) {
      if (c != '"') {
        fields.back().push_back(c);
      } else if (i < line.size() && line[i] == '"') {
        fields.back().push_back('"');
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  return fields;
}

} // namespace qpp::csv
