#include "wdsr/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include <fmt/core.h>

#include "wdsr/errors.hpp"

namespace wdsr::csv {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Table parse(std::istream& in, const std::string& origin) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t start_line = line_no;
    if (trim(line).empty()) continue;

    Row row;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    std::size_t i = 0;
    for (;;) {
      if (i == line.size()) {
        if (quoted) {
          // Quoted field spans a newline.
          std::string next;
          if (!std::getline(in, next)) {
            throw ParseError(fmt::format("{}:{}: unterminated quoted field", origin, start_line));
          }
          ++line_no;
          field.push_back('\n');
          line = std::move(next);
          i = 0;
          continue;
        }
        row.push_back(was_quoted ? field : trim(field));
        break;
      }
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"' && trim(field).empty()) {
        field.clear();
        quoted = true;
        was_quoted = true;
      } else if (c == ',') {
        row.push_back(was_quoted ? field : trim(field));
        field.clear();
        was_quoted = false;
      } else if (!(was_quoted && (c == ' ' || c == '\t' || c == '\r'))) {
        if (was_quoted) {
          throw ParseError(fmt::format("{}:{}: text after closing quote", origin, start_line));
        }
        field.push_back(c);
      }
      ++i;
    }

    if (!have_header) {
      table.header = std::move(row);
      have_header = true;
    } else {
      if (row.size() != table.header.size()) {
        throw ParseError(fmt::format("{}:{}: expected {} fields, found {}", origin, start_line,
                                     table.header.size(), row.size()));
      }
      table.rows.push_back(std::move(row));
      table.lines.push_back(start_line);
    }
  }
  if (!have_header) throw ParseError(fmt::format("{}: empty file", origin));
  return table;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  return parse(in, path.string());
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError(fmt::format("{}: '{}' is not a number", what, text));
  }
  return value;
}

long long to_integer(const std::string& text, const std::string& what) {
  long long value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError(fmt::format("{}: '{}' is not an integer", what, text));
  }
  return value;
}

}  // namespace wdsr::csv
