#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace wdsr {

/// Classification flags of a resilience metric, in catalog column order.
enum class Flag {
  Monitor,
  React,
  Learn,
  Anticipate,
  TimeIndependent,
  TimeDependent,
  GraphTheoretic,
  PerformanceBased,
  ScoreBased,
  Composite,
  BaselineFunctionality,
  Redundancy,
  Recovery,
};

inline constexpr std::size_t kFlagCount = 13;

inline constexpr std::array<Flag, kFlagCount> kAllFlags = {
    Flag::Monitor,          Flag::React,          Flag::Learn,
    Flag::Anticipate,       Flag::TimeIndependent, Flag::TimeDependent,
    Flag::GraphTheoretic,   Flag::PerformanceBased, Flag::ScoreBased,
    Flag::Composite,        Flag::BaselineFunctionality, Flag::Redundancy,
    Flag::Recovery};

inline constexpr std::array<Flag, 4> kFunctionFlags = {Flag::Monitor, Flag::React, Flag::Learn,
                                                       Flag::Anticipate};
inline constexpr std::array<Flag, 3> kPropertyFlags = {Flag::BaselineFunctionality,
                                                       Flag::Redundancy, Flag::Recovery};
inline constexpr std::array<Flag, 3> kQuantificationFlags = {
    Flag::GraphTheoretic, Flag::PerformanceBased, Flag::ScoreBased};

/// Catalog column code, e.g. "TD".
std::string_view flag_code(Flag f);
/// Long label, e.g. "time-dependent".
std::string_view flag_label(Flag f);
std::optional<Flag> parse_flag(std::string_view code_or_label);

struct MetricRecord {
  std::string metric;
  std::string citation;
  std::array<bool, kFlagCount> flags{};
  int cluster = 0;  ///< 1..5, 0 when absent

  [[nodiscard]] bool has(Flag f) const { return flags[static_cast<std::size_t>(f)]; }
  void set(Flag f, bool v) { flags[static_cast<std::size_t>(f)] = v; }
};

struct Catalog {
  std::vector<MetricRecord> records;
  /// Non-fatal findings, e.g. rows without a quantification flag.
  std::vector<std::string> warnings;
};

/// Reads `metric,citation,M,R,L,A,TI,TD,GT,PB,SB,CM,BF,RD,RC,CL` with 0/1
/// flags (blank counts as 0) and CL in 1..5 (blank allowed).
Catalog load_catalog(const std::filesystem::path& path);
Catalog parse_catalog(std::istream& in, const std::string& origin);

/// data/catalog.csv of the source tree.
std::filesystem::path shipped_catalog_path();

struct SummaryCounts {
  std::size_t total = 0;
  std::array<std::size_t, kFlagCount> counts{};
  /// Metrics assessing 0..4 functions.
  std::array<std::size_t, 5> function_histogram{};
  /// Metrics addressing 0..3 properties.
  std::array<std::size_t, 4> property_histogram{};

  [[nodiscard]] std::size_t count(Flag f) const { return counts[static_cast<std::size_t>(f)]; }
  [[nodiscard]] double percent(Flag f) const;
};

SummaryCounts summary_counts(std::span<const MetricRecord> records);
std::string summary_table(const SummaryCounts& counts);
nlohmann::ordered_json to_json(const SummaryCounts& counts);

/// Pearson coefficients between flag columns. Entries involving a
/// zero-variance column are undefined (NaN, `defined` false).
struct CorrelationMatrix {
  std::vector<Flag> columns;
  std::vector<double> values;
  std::vector<bool> defined;

  [[nodiscard]] std::size_t size() const { return columns.size(); }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  [[nodiscard]] bool is_defined(std::size_t i, std::size_t j) const { return defined[i * size() + j]; }
  /// Coefficient by flag; throws when either flag is not a column.
  [[nodiscard]] double between(Flag a, Flag b) const;
};

/// Column preset of the published correlation matrix: all 13 flags.
std::vector<Flag> correlation_columns();
/// Feature preset for clustering: functions, properties, time dependence
/// and quantification (all 13 flags).
std::vector<Flag> clustering_features();

/// Plain Pearson coefficient; nullopt when either input has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

CorrelationMatrix pearson_matrix(std::span<const MetricRecord> records, std::span<const Flag> columns);
/// Square CSV with a label header row and column; undefined entries are "nan".
std::string correlation_csv(const CorrelationMatrix& m);

}  // namespace wdsr
