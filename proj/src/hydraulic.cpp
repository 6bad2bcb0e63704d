#include "wdsr/hydraulic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/core.h>

#include "wdsr/csv.hpp"
#include "wdsr/digest.hpp"
#include "wdsr/errors.hpp"

namespace wdsr {

HydraulicSeries HydraulicSeries::zeros(std::vector<std::string> node_ids, std::size_t steps) {
  HydraulicSeries s;
  s.node_ids = std::move(node_ids);
  s.steps = steps;
  const std::size_t n = s.node_ids.size() * steps;
  s.delivered.assign(n, 0.0);
  s.demand.assign(n, 0.0);
  s.head.assign(n, 0.0);
  s.required_head.assign(n, 0.0);
  s.window_begin = 0;
  s.window_end = steps;
  return s;
}

std::size_t HydraulicSeries::node_column(std::string_view id) const {
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    if (node_ids[i] == id) return i;
  }
  throw ValidationError(fmt::format("node '{}' not in series", id));
}

void HydraulicSeries::set_window(std::size_t begin, std::size_t end) {
  if (!(begin < end && end <= steps)) {
    throw ValidationError(
        fmt::format("invalid window [{}, {}) for a series of {} steps", begin, end, steps));
  }
  window_begin = begin;
  window_end = end;
}

void HydraulicSeries::validate() const {
  if (node_ids.empty()) throw ValidationError("series has no nodes");
  if (steps == 0) throw ValidationError("series has no timesteps");
  const std::size_t n = node_ids.size() * steps;
  if (delivered.size() != n || demand.size() != n || head.size() != n ||
      required_head.size() != n) {
    throw ValidationError("series columns differ in length");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : node_ids) {
    if (!seen.insert(id).second) throw ValidationError(fmt::format("duplicate node '{}'", id));
  }
  if (!(window_begin < window_end && window_end <= steps)) {
    throw ValidationError("analysis window must satisfy T0 < T <= steps");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto& node = node_ids[k % node_ids.size()];
    const std::size_t t = k / node_ids.size();
    if (!(std::isfinite(delivered[k]) && delivered[k] >= 0.0)) {
      throw ValidationError(fmt::format("negative or non-finite delivered flow at t={} node '{}'", t, node));
    }
    if (!(std::isfinite(demand[k]) && demand[k] >= 0.0)) {
      throw ValidationError(fmt::format("negative or non-finite demand at t={} node '{}'", t, node));
    }
    if (!std::isfinite(head[k]) || !std::isfinite(required_head[k])) {
      throw ValidationError(fmt::format("non-finite head at t={} node '{}'", t, node));
    }
  }
  if (!(step_seconds > 0.0)) throw ValidationError("timestep duration must be > 0");
}

std::string HydraulicSeries::digest() const {
  Digest d;
  d.update(step_seconds).update(static_cast<std::uint64_t>(steps));
  for (const auto& id : node_ids) d.update(id);
  for (const auto* column : {&delivered, &demand, &head, &required_head}) {
    for (double v : *column) d.update(v);
  }
  d.update(static_cast<std::uint64_t>(window_begin)).update(static_cast<std::uint64_t>(window_end));
  return d.hex();
}

HydraulicSeries parse_series(std::string_view csv_text, const std::string& origin,
                             double step_seconds) {
  std::istringstream in{std::string(csv_text)};
  const auto table = csv::parse(in, origin);

  static constexpr const char* kColumns[] = {"t",      "node_id",          "delivered_m3s",
                                             "demand_m3s", "head_m", "required_head_m"};
  int col[6];
  for (int c = 0; c < 6; ++c) {
    col[c] = table.column(kColumns[c]);
    if (col[c] < 0) throw ParseError(fmt::format("{}: missing column '{}'", origin, kColumns[c]));
  }
  if (table.header.size() != 6) throw ParseError(fmt::format("{}: unexpected extra columns", origin));
  if (table.rows.empty()) throw ParseError(fmt::format("{}: no data rows", origin));

  struct Values {
    double delivered, demand, head, required;
  };
  std::map<long long, std::unordered_map<std::string, Values>> by_step;
  std::vector<std::string> node_order;
  std::unordered_set<std::string> known;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = fmt::format("{}:{}", origin, table.lines[r]);
    const long long t = csv::to_integer(row[col[0]], where + ": t");
    if (t < 0) throw ParseError(where + ": t must be >= 0");
    const std::string& node = row[col[1]];
    if (node.empty()) throw ParseError(where + ": empty node_id");
    Values v{csv::to_double(row[col[2]], where + ": delivered_m3s"),
             csv::to_double(row[col[3]], where + ": demand_m3s"),
             csv::to_double(row[col[4]], where + ": head_m"),
             csv::to_double(row[col[5]], where + ": required_head_m")};
    if (!by_step[t].emplace(node, v).second) {
      throw ValidationError(fmt::format("{}: duplicate row for t={} node '{}'", where, t, node));
    }
    if (known.insert(node).second) node_order.push_back(node);
  }

  const std::size_t steps = by_step.size();
  if (by_step.rbegin()->first != static_cast<long long>(steps) - 1) {
    throw ValidationError(fmt::format("{}: timesteps must be contiguous from 0", origin));
  }
  auto series = HydraulicSeries::zeros(node_order, steps);
  series.step_seconds = step_seconds;
  for (const auto& [t, rows] : by_step) {
    if (rows.size() != node_order.size()) {
      throw ValidationError(
          fmt::format("{}: step {} lists {} nodes, expected {}", origin, t, rows.size(), node_order.size()));
    }
    for (std::size_t i = 0; i < node_order.size(); ++i) {
      const auto& v = rows.at(node_order[i]);
      const std::size_t k = series.at(static_cast<std::size_t>(t), i);
      series.delivered[k] = v.delivered;
      series.demand[k] = v.demand;
      series.head[k] = v.head;
      series.required_head[k] = v.required;
    }
  }
  series.validate();
  return series;
}

HydraulicSeries load_series(const std::filesystem::path& path, double step_seconds) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_series(buffer.str(), path.string(), step_seconds);
}

std::string series_to_csv(const HydraulicSeries& series) {
  std::string out = "t,node_id,delivered_m3s,demand_m3s,head_m,required_head_m\n";
  for (std::size_t t = 0; t < series.steps; ++t) {
    for (std::size_t i = 0; i < series.node_count(); ++i) {
      const std::size_t k = series.at(t, i);
      out += fmt::format("{},{},{},{},{},{}\n", t, csv::escape(series.node_ids[i]),
                         series.delivered[k], series.demand[k], series.head[k],
                         series.required_head[k]);
    }
  }
  return out;
}

void save_series(const HydraulicSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << series_to_csv(series);
}

std::size_t BinaryStateSeries::count(State s) const {
  return static_cast<std::size_t>(std::count(states.begin(), states.end(), s));
}

BinaryStateSeries classify_states(const HydraulicSeries& series, double threshold,
                                  ThresholdMode mode) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ValidationError(fmt::format("threshold {} outside (0, 1]", threshold));
  }
  series.validate();
  BinaryStateSeries result;
  result.threshold = threshold;
  result.mode = mode;
  for (std::size_t t = series.window_begin; t < series.window_end; ++t) {
    bool ok = true;
    if (mode == ThresholdMode::System) {
      double supplied = 0.0;
      double required = 0.0;
      for (std::size_t i = 0; i < series.node_count(); ++i) {
        supplied += series.delivered[series.at(t, i)];
        required += series.demand[series.at(t, i)];
      }
      ok = required == 0.0 || supplied / required >= threshold;
    } else {
      for (std::size_t i = 0; i < series.node_count() && ok; ++i) {
        const double d = series.demand[series.at(t, i)];
        ok = d == 0.0 || series.delivered[series.at(t, i)] / d >= threshold;
      }
    }
    result.states.push_back(ok ? State::Satisfactory : State::Failure);
  }
  return result;
}

}  // namespace wdsr
