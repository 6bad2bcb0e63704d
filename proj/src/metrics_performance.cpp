#include "wdsr/metrics_performance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include <fmt/core.h>

#include "wdsr/digest.hpp"
#include "wdsr/errors.hpp"

namespace wdsr {

namespace {

constexpr NominalRange kUnit{0.0, 1.0};

std::string combined_digest(const Network& net, const HydraulicSeries& series) {
  return Digest().update(net.digest()).update(series.digest()).hex();
}

// Column of each network junction in the series. Series and network must
// cover exactly the same junctions.
std::vector<std::size_t> junction_columns(const Network& net, const HydraulicSeries& series) {
  if (series.node_count() != net.junction_count()) {
    throw ValidationError(fmt::format("series has {} nodes, network has {} junctions",
                                      series.node_count(), net.junction_count()));
  }
  std::vector<std::size_t> columns(net.junction_count());
  for (std::size_t i = 0; i < net.junction_count(); ++i) {
    columns[i] = series.node_column(net.junctions()[i].id);
  }
  return columns;
}

}  // namespace

MetricValue hashimoto_recovery(const BinaryStateSeries& states) {
  const auto& s = states.states;
  if (s.size() < 2) throw ValidationError("recovery rate needs at least two states");

  Digest d;
  d.update(states.threshold);
  for (State x : s) d.update(x == State::Satisfactory ? std::string_view("S") : "F");

  const std::size_t satisfactory = states.count(State::Satisfactory);
  if (satisfactory == s.size()) {
    auto m = make_metric("hashimoto_recovery", 1.0, kUnit, d.hex());
    m.flags.push_back(kNoFailureObserved);
    return m;
  }
  std::size_t s_to_f = 0;
  for (std::size_t t = 0; t + 1 < s.size(); ++t) {
    if (s[t] == State::Satisfactory && s[t + 1] == State::Failure) ++s_to_f;
  }
  const double total = static_cast<double>(s.size());
  const double alpha = static_cast<double>(satisfactory) / total;
  const double rho = static_cast<double>(s_to_f) / (total - 1.0);
  return make_metric("hashimoto_recovery", rho / (1.0 - alpha), kUnit, d.hex());
}

MetricValue zhuang_availability(const HydraulicSeries& series) {
  series.validate();
  double supplied = 0.0;
  double required = 0.0;
  for (std::size_t t = series.window_begin; t < series.window_end; ++t) {
    for (std::size_t i = 0; i < series.node_count(); ++i) {
      supplied += series.delivered[series.at(t, i)];
      required += series.demand[series.at(t, i)];
    }
  }
  if (required <= 0.0) throw UndefinedInputError("availability undefined: total demand is zero");
  return make_metric("zhuang_availability", supplied / required, kUnit, series.digest());
}

double pipe_fragility(const Pipe& pipe) {
  if (!(pipe.repair_rate >= 0.0) || !(pipe.length > 0.0)) {
    throw ValidationError(fmt::format("pipe '{}': fragility needs RR >= 0 and L > 0", pipe.id));
  }
  return -std::expm1(-pipe.repair_rate * pipe.length);
}

MetricValue flow_based_resilience(const Network& net, const HydraulicSeries& series) {
  series.validate();
  const auto columns = junction_columns(net, series);

  std::vector<double> reliability(net.junction_count(), 0.0);
  for (std::size_t i = 0; i < net.junction_count(); ++i) {
    for (std::size_t p : net.incident_pipes(i)) reliability[i] += 1.0 - pipe_fragility(net.pipes()[p]);
  }

  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t t = series.window_begin; t < series.window_end; ++t) {
    for (std::size_t i = 0; i < net.junction_count(); ++i) {
      const std::size_t k = series.at(t, columns[i]);
      const double q = series.demand[k];
      numerator += reliability[i] * q * (series.head[k] - series.required_head[k]);
      denominator += q * series.required_head[k];
    }
  }
  denominator *= 4.0;
  if (!(denominator > 0.0)) {
    throw UndefinedInputError("flow-based resilience undefined: sum of q* h* is zero");
  }
  return make_metric("flow_based_resilience", numerator / denominator, kUnit,
                     combined_digest(net, series));
}

double user_functionality(double supply, double demand) {
  if (demand == 0.0) throw UndefinedInputError("user functionality undefined for zero demand");
  return supply / demand;
}

MetricValue user_severity(const HydraulicSeries& series, std::string_view node_id) {
  series.validate();
  const std::size_t i = series.node_column(node_id);
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t t = series.window_begin; t < series.window_end; ++t) {
    const std::size_t k = series.at(t, i);
    if (series.demand[k] == 0.0) {
      throw UndefinedInputError(fmt::format("user severity undefined: node '{}' has zero demand at t={}", node_id, t));
    }
    lowest = std::min(lowest, user_functionality(series.delivered[k], series.demand[k]));
  }
  auto m = make_metric("user_severity", lowest, kUnit,
                       Digest().update(series.digest()).update(node_id).hex());
  return m;
}

MetricValue todini_index(const Network& net, const HydraulicSeries& state) {
  state.validate();
  if (state.window_end - state.window_begin != 1) {
    throw ValidationError("resilience index needs a single-timestep state");
  }
  const auto columns = junction_columns(net, state);
  const std::size_t t = state.window_begin;

  double surplus = 0.0;
  double required_power = 0.0;
  for (std::size_t i = 0; i < net.junction_count(); ++i) {
    const std::size_t k = state.at(t, columns[i]);
    surplus += state.demand[k] * (state.head[k] - state.required_head[k]);
    required_power += state.demand[k] * state.required_head[k];
  }
  double available = 0.0;
  for (const auto& s : net.sources()) available += s.outflow * s.total_head;
  for (const auto& p : net.pumps()) available += p.power / kWaterSpecificWeight;

  const double denominator = available - required_power;
  if (!(denominator > 0.0)) {
    throw InfeasibleDesignError(fmt::format(
        "resilience index undefined: available power {} does not exceed required {}", available,
        required_power));
  }
  return make_metric("todini_index", surplus / denominator, kUnit, combined_digest(net, state));
}

}  // namespace wdsr
