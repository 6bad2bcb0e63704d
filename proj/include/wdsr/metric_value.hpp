#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wdsr {

struct NominalRange {
  double lower;
  double upper;
};

/// A computed metric with the context needed to interpret it. Values
/// outside a closed nominal range are kept as computed and carry a warning.
struct MetricValue {
  std::string name;
  double value = 0.0;
  std::optional<NominalRange> nominal_range;  ///< nullopt: unbounded
  std::vector<std::string> warnings;
  std::vector<std::string> flags;
  std::string inputs_digest;

  [[nodiscard]] bool out_of_range() const;
  [[nodiscard]] bool has_flag(const std::string& flag) const;
};

/// Builds a MetricValue, attaching an out-of-range warning when needed.
/// Throws ComputationError for non-finite values.
MetricValue make_metric(std::string name, double value, std::optional<NominalRange> range,
                        std::string inputs_digest);

nlohmann::ordered_json to_json(const MetricValue& metric);

}  // namespace wdsr
