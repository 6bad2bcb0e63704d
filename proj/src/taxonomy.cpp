#include "wdsr/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/core.h>

#include "wdsr/csv.hpp"
#include "wdsr/errors.hpp"

namespace wdsr {

namespace {

struct FlagInfo {
  Flag flag;
  const char* code;
  const char* label;
};

constexpr FlagInfo kFlagInfo[kFlagCount] = {
    {Flag::Monitor, "M", "monitor"},
    {Flag::React, "R", "react"},
    {Flag::Learn, "L", "learn"},
    {Flag::Anticipate, "A", "anticipate"},
    {Flag::TimeIndependent, "TI", "time-independent"},
    {Flag::TimeDependent, "TD", "time-dependent"},
    {Flag::GraphTheoretic, "GT", "graph-theoretical"},
    {Flag::PerformanceBased, "PB", "performance-based"},
    {Flag::ScoreBased, "SB", "score-based"},
    {Flag::Composite, "CM", "composite"},
    {Flag::BaselineFunctionality, "BF", "baseline functionality"},
    {Flag::Redundancy, "RD", "redundancy"},
    {Flag::Recovery, "RC", "recovery"},
};

constexpr const char* kHeader[] = {"metric", "citation", "M",  "R",  "L",  "A",  "TI", "TD",
                                   "GT",     "PB",       "SB", "CM", "BF", "RD", "RC", "CL"};

}  // namespace

std::string_view flag_code(Flag f) { return kFlagInfo[static_cast<std::size_t>(f)].code; }
std::string_view flag_label(Flag f) { return kFlagInfo[static_cast<std::size_t>(f)].label; }

std::optional<Flag> parse_flag(std::string_view text) {
  for (const auto& info : kFlagInfo) {
    if (text == info.code || text == info.label) return info.flag;
  }
  return std::nullopt;
}

Catalog parse_catalog(std::istream& in, const std::string& origin) {
  const auto table = csv::parse(in, origin);
  if (table.header.size() != std::size(kHeader)) {
    throw ParseError(fmt::format("{}: expected {} columns, found {}", origin, std::size(kHeader),
                                 table.header.size()));
  }
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] != kHeader[c]) {
      throw ParseError(fmt::format("{}: unknown or misplaced column '{}' (expected '{}')", origin,
                                   table.header[c], kHeader[c]));
    }
  }
  if (table.rows.empty()) throw ParseError(fmt::format("{}: no records", origin));

  Catalog catalog;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = fmt::format("{}:{}", origin, table.lines[r]);
    MetricRecord rec;
    rec.metric = row[0];
    rec.citation = row[1];
    if (rec.metric.empty()) throw ParseError(where + ": empty metric name");
    for (std::size_t f = 0; f < kFlagCount; ++f) {
      const std::string& cell = row[2 + f];
      if (cell.empty() || cell == "0") {
        rec.flags[f] = false;
      } else if (cell == "1") {
        rec.flags[f] = true;
      } else {
        throw ParseError(fmt::format("{}: column {} must be 0 or 1, found '{}'", where, kHeader[2 + f], cell));
      }
    }
    if (!row[15].empty()) {
      const auto cl = csv::to_integer(row[15], where + ": CL");
      if (cl < 1 || cl > 5) throw ParseError(fmt::format("{}: CL must be in 1..5", where));
      rec.cluster = static_cast<int>(cl);
    }

    auto any_of = [&](auto flags) {
      for (Flag f : flags) {
        if (rec.has(f)) return true;
      }
      return false;
    };
    if (!any_of(kFunctionFlags)) {
      catalog.warnings.push_back(fmt::format("{}: '{}' has no function flag", where, rec.metric));
    }
    if (!any_of(kQuantificationFlags)) {
      catalog.warnings.push_back(fmt::format("{}: '{}' has no quantification flag", where, rec.metric));
    }
    if (rec.has(Flag::TimeIndependent) && rec.has(Flag::TimeDependent)) {
      catalog.warnings.push_back(fmt::format("{}: '{}' is flagged both TI and TD", where, rec.metric));
    }
    catalog.records.push_back(std::move(rec));
  }
  return catalog;
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  return parse_catalog(in, path.string());
}

std::filesystem::path shipped_catalog_path() {
  return std::filesystem::path(WDSR_DATA_DIR) / "catalog.csv";
}

double SummaryCounts::percent(Flag f) const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(count(f)) / static_cast<double>(total);
}

SummaryCounts summary_counts(std::span<const MetricRecord> records) {
  SummaryCounts s;
  s.total = records.size();
  for (const auto& rec : records) {
    for (std::size_t f = 0; f < kFlagCount; ++f) s.counts[f] += rec.flags[f] ? 1 : 0;
    std::size_t functions = 0;
    for (Flag f : kFunctionFlags) functions += rec.has(f) ? 1 : 0;
    std::size_t properties = 0;
    for (Flag f : kPropertyFlags) properties += rec.has(f) ? 1 : 0;
    ++s.function_histogram[functions];
    ++s.property_histogram[properties];
  }
  return s;
}

std::string summary_table(const SummaryCounts& counts) {
  std::string out = fmt::format("{:<28} {:>5} {:>7}\n", "category", "count", "percent");
  for (Flag f : kAllFlags) {
    out += fmt::format("{:<28} {:>5} {:>6.1f}%\n", flag_label(f), counts.count(f), counts.percent(f));
  }
  out += fmt::format("{:<28} {:>5}\n", "total", counts.total);
  for (std::size_t k = 0; k < counts.function_histogram.size(); ++k) {
    out += fmt::format("{:<28} {:>5}\n", fmt::format("assessing {} function(s)", k), counts.function_histogram[k]);
  }
  for (std::size_t k = 0; k < counts.property_histogram.size(); ++k) {
    out += fmt::format("{:<28} {:>5}\n", fmt::format("addressing {} property(ies)", k), counts.property_histogram[k]);
  }
  return out;
}

nlohmann::ordered_json to_json(const SummaryCounts& counts) {
  nlohmann::ordered_json j;
  j["total"] = counts.total;
  nlohmann::ordered_json flags;
  for (Flag f : kAllFlags) {
    flags[std::string(flag_code(f))] = {{"label", flag_label(f)},
                                        {"count", counts.count(f)},
                                        {"percent", counts.percent(f)}};
  }
  j["flags"] = flags;
  j["function_histogram"] = counts.function_histogram;
  j["property_histogram"] = counts.property_histogram;
  return j;
}

double CorrelationMatrix::between(Flag a, Flag b) const {
  std::optional<std::size_t> ia, ib;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == a) ia = i;
    if (columns[i] == b) ib = i;
  }
  if (!ia || !ib) throw ValidationError("flag not among the correlation columns");
  return at(*ia, *ib);
}

std::vector<Flag> correlation_columns() { return {kAllFlags.begin(), kAllFlags.end()}; }
std::vector<Flag> clustering_features() { return {kAllFlags.begin(), kAllFlags.end()}; }

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("pearson needs two equal-length samples of size >= 2");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(std::span<const MetricRecord> records, std::span<const Flag> columns) {
  if (records.size() < 2) throw ValidationError("correlation needs at least two records");
  const std::size_t m = columns.size();
  std::vector<std::vector<double>> data(m, std::vector<double>(records.size()));
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t r = 0; r < records.size(); ++r) data[c][r] = records[r].has(columns[c]) ? 1.0 : 0.0;
  }
  CorrelationMatrix out;
  out.columns.assign(columns.begin(), columns.end());
  out.values.assign(m * m, std::numeric_limits<double>::quiet_NaN());
  out.defined.assign(m * m, false);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const auto r = pearson(data[i], data[j]);
      if (!r) continue;
      const double v = i == j ? 1.0 : *r;
      out.values[i * m + j] = out.values[j * m + i] = v;
      out.defined[i * m + j] = out.defined[j * m + i] = true;
    }
  }
  return out;
}

std::string correlation_csv(const CorrelationMatrix& m) {
  std::string out = "category";
  for (Flag f : m.columns) out += "," + csv::escape(flag_label(f));
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += csv::escape(flag_label(m.columns[i]));
    for (std::size_t j = 0; j < m.size(); ++j) {
      out += m.is_defined(i, j) ? fmt::format(",{}", m.at(i, j)) : std::string(",nan");
    }
    out += "\n";
  }
  return out;
}

}  // namespace wdsr
