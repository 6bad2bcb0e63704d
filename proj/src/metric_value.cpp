#include "wdsr/metric_value.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "wdsr/errors.hpp"

namespace wdsr {

bool MetricValue::out_of_range() const {
  return nominal_range && (value < nominal_range->lower || value > nominal_range->upper);
}

bool MetricValue::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

MetricValue make_metric(std::string name, double value, std::optional<NominalRange> range,
                        std::string inputs_digest) {
  if (!std::isfinite(value)) {
    throw ComputationError(fmt::format("{}: result is not finite", name));
  }
  MetricValue m{std::move(name), value, range, {}, {}, std::move(inputs_digest)};
  if (m.out_of_range()) {
    m.warnings.push_back(fmt::format("value {} outside nominal range [{}, {}]", value,
                                     range->lower, range->upper));
  }
  return m;
}

nlohmann::ordered_json to_json(const MetricValue& metric) {
  nlohmann::ordered_json j;
  j["name"] = metric.name;
  j["value"] = metric.value;
  if (metric.nominal_range) {
    j["nominal_range"] = {metric.nominal_range->lower, metric.nominal_range->upper};
  } else {
    j["nominal_range"] = "unbounded";
  }
  j["warnings"] = metric.warnings;
  j["flags"] = metric.flags;
  j["inputs_digest"] = metric.inputs_digest;
  return j;
}

}  // namespace wdsr
