#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wdsr::csv {

using Row = std::vector<std::string>;

/// Parsed CSV table. Quoted fields follow RFC 4180; surrounding spaces of
/// unquoted fields are trimmed. Blank lines are skipped.
struct Table {
  Row header;
  std::vector<Row> rows;
  /// 1-based source line of each row, for error messages.
  std::vector<std::size_t> lines;

  /// Index of a header column or -1.
  [[nodiscard]] int column(std::string_view name) const;
};

Table parse(std::istream& in, const std::string& origin);
Table read_file(const std::filesystem::path& path);

/// Quotes a field if it holds a comma, quote or newline.
std::string escape(std::string_view field);

/// Strict numeric conversion; throws ParseError naming `what`.
double to_double(const std::string& text, const std::string& what);
long long to_integer(const std::string& text, const std::string& what);

}  // namespace wdsr::csv
