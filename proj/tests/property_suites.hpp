// Randomized invariant suites shared by the gtest binary and the acceptance
// runner. Each suite returns an empty string on success and a description of
// the first counterexample otherwise.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>

#include <fmt/core.h>

#include "support.hpp"
#include "wdsr/errors.hpp"
#include "wdsr/metrics_performance.hpp"
#include "wdsr/metrics_score.hpp"

namespace wdsr::test {

inline constexpr int kPropertyCases = 1000;

inline HydraulicSeries random_series(std::mt19937_64& rng, std::size_t nodes, std::size_t steps) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < nodes; ++i) ids.push_back("n" + std::to_string(i));
  auto s = HydraulicSeries::zeros(ids, steps);
  for (std::size_t k = 0; k < s.delivered.size(); ++k) {
    s.demand[k] = coin(rng, 0.1) ? 0.0 : uniform(rng, 0.001, 0.05);
    s.delivered[k] = s.demand[k] * uniform(rng, 0.0, 1.0);
    s.required_head[k] = uniform(rng, 10.0, 40.0);
    s.head[k] = s.required_head[k] + uniform(rng, -5.0, 20.0);
  }
  s.demand[0] = std::max(s.demand[0], 0.001);
  return s;
}

/// One-step state on the junctions of `net` at design demand with heads at
/// or above the requirement.
inline HydraulicSeries random_state(std::mt19937_64& rng, const Network& net) {
  std::vector<std::string> ids;
  for (const auto& j : net.junctions()) ids.push_back(j.id);
  auto s = HydraulicSeries::zeros(ids, 1);
  for (std::size_t i = 0; i < net.junction_count(); ++i) {
    s.demand[i] = net.junctions()[i].design_demand;
    s.delivered[i] = s.demand[i];
    s.required_head[i] = net.junctions()[i].required_head;
    s.head[i] = s.required_head[i] + uniform(rng, 0.0, 30.0);
  }
  return s;
}

struct Relabelled {
  Network net;
  HydraulicSeries state;
};

/// Renames every element and shuffles the storage order of junctions,
/// sources, pumps and pipes; the state follows the new junction order.
inline Relabelled relabel(std::mt19937_64& rng, const Network& net, const HydraulicSeries& state) {
  std::map<std::string, std::string> rename;
  auto fresh = [&](const std::string& id) {
    const std::string name = fmt::format("z{}_{}", rng() % 100000, id);
    rename[id] = name;
    return name;
  };
  auto junctions = net.junctions();
  auto sources = net.sources();
  auto pumps = net.pumps();
  auto pipes = net.pipes();
  for (auto& j : junctions) j.id = fresh(j.id);
  for (auto& s : sources) s.id = fresh(s.id);
  for (auto& p : pumps) {
    p.id = "pump_" + p.id;
    if (p.source) p.source = rename.at(*p.source);
  }
  for (auto& p : pipes) {
    p.id = fmt::format("pipe_{}_{}", rng() % 100000, p.id);
    p.from = rename.at(p.from);
    p.to = rename.at(p.to);
  }
  std::shuffle(junctions.begin(), junctions.end(), rng);
  std::shuffle(sources.begin(), sources.end(), rng);
  std::shuffle(pumps.begin(), pumps.end(), rng);
  std::shuffle(pipes.begin(), pipes.end(), rng);

  std::vector<std::string> ids;
  for (const auto& j : junctions) ids.push_back(j.id);
  auto moved = HydraulicSeries::zeros(ids, 1);
  for (std::size_t i = 0; i < net.junction_count(); ++i) {
    const auto to = static_cast<std::size_t>(
        std::find(ids.begin(), ids.end(), rename.at(net.junctions()[i].id)) - ids.begin());
    moved.demand[to] = state.demand[i];
    moved.delivered[to] = state.delivered[i];
    moved.head[to] = state.head[i];
    moved.required_head[to] = state.required_head[i];
  }
  return {Network::build(junctions, sources, pumps, pipes), moved};
}

inline std::optional<double> todini_or_none(const Network& net, const HydraulicSeries& state) {
  try {
    return todini_index(net, state).value;
  } catch (const InfeasibleDesignError&) {
    return std::nullopt;
  }
}

inline bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

inline std::string zhuang_monotone_suite(std::uint64_t seed, int cases = kPropertyCases) {
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    auto s = random_series(rng, pick(rng, 1, 6), pick(rng, 1, 8));
    const double before = zhuang_availability(s).value;
    if (before < 0.0 || before > 1.0 + 1e-12) return fmt::format("case {}: value {} outside [0, 1]", c, before);
    const std::size_t k = pick(rng, 0, s.delivered.size() - 1);
    s.delivered[k] += uniform(rng, 0.0, s.demand[k] - s.delivered[k]);
    const double after = zhuang_availability(s).value;
    if (after < before) return fmt::format("case {}: raising delivery lowered {} to {}", c, before, after);
    if (after > 1.0 + 1e-12) return fmt::format("case {}: value {} above 1", c, after);
  }
  return {};
}

inline std::string fragility_increasing_suite(std::uint64_t seed, int cases = kPropertyCases) {
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    Pipe p;
    p.length = uniform(rng, 1.0, 5000.0);
    p.diameter = 0.1;
    p.friction_factor = 0.02;
    p.repair_rate = uniform(rng, 0.0, 0.001);
    const double base = pipe_fragility(p);
    if (base < 0.0 || base >= 1.0) return fmt::format("case {}: P_f {} outside [0, 1)", c, base);
    if (std::abs(base - (1.0 - std::exp(-p.repair_rate * p.length))) > 1e-15) {
      return fmt::format("case {}: P_f {} differs from closed form", c, base);
    }
    Pipe longer = p;
    longer.length *= uniform(rng, 1.01, 3.0);
    Pipe weaker = p;
    weaker.repair_rate += uniform(rng, 1e-5, 0.001);
    if (p.repair_rate > 0.0 && !(pipe_fragility(longer) > base)) {
      return fmt::format("case {}: longer pipe not more fragile", c);
    }
    if (!(pipe_fragility(weaker) > base)) return fmt::format("case {}: higher repair rate not more fragile", c);
  }
  return {};
}

inline std::string todini_relabel_suite(std::uint64_t seed, int cases = kPropertyCases) {
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases;) {
    RandomNetworkOptions opt;
    opt.max_pumps = 2;
    const auto net = random_network(rng, opt);
    const auto state = random_state(rng, net);
    const auto value = todini_or_none(net, state);
    if (!value) continue;
    const auto moved = relabel(rng, net, state);
    const auto again = todini_or_none(moved.net, moved.state);
    if (!again) return fmt::format("case {}: relabelled network became infeasible", c);
    if (!close(*again, *value, 1e-12)) return fmt::format("case {}: {} became {} after relabelling", c, *value, *again);
    ++c;
  }
  return {};
}

/// Flows scale by c and heads by d. Pump power is a flow times a head, so
/// it scales by c * d.
inline std::string todini_scaling_suite(std::uint64_t seed, int cases = kPropertyCases) {
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases;) {
    RandomNetworkOptions opt;
    opt.max_pumps = 2;
    const auto net = random_network(rng, opt);
    const auto state = random_state(rng, net);
    const auto value = todini_or_none(net, state);
    if (!value) continue;
    const double cf = uniform(rng, 0.1, 10.0);
    const double dh = uniform(rng, 0.1, 10.0);
    auto junctions = net.junctions();
    auto sources = net.sources();
    auto pumps = net.pumps();
    for (auto& j : junctions) {
      j.design_demand *= cf;
      j.required_head *= dh;
    }
    for (auto& s : sources) {
      s.outflow *= cf;
      s.total_head *= dh;
    }
    for (auto& p : pumps) p.power *= cf * dh;
    const auto scaled_net = Network::build(junctions, sources, pumps, net.pipes());
    auto scaled = state;
    for (std::size_t k = 0; k < scaled.demand.size(); ++k) {
      scaled.demand[k] *= cf;
      scaled.delivered[k] *= cf;
      scaled.head[k] *= dh;
      scaled.required_head[k] *= dh;
    }
    const auto again = todini_or_none(scaled_net, scaled);
    if (!again) return fmt::format("case {}: scaled network became infeasible", c);
    if (!close(*again, *value, 1e-9)) {
      return fmt::format("case {}: {} became {} under c={} d={}", c, *value, *again, cf, dh);
    }
    ++c;
  }
  return {};
}

inline std::string flow_based_relabel_suite(std::uint64_t seed, int cases = kPropertyCases) {
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases;) {
    const auto net = random_network(rng);
    double required = 0.0;
    for (const auto& j : net.junctions()) required += j.design_demand * j.required_head;
    if (required == 0.0) continue;
    const auto state = random_state(rng, net);
    const double value = flow_based_resilience(net, state).value;
    const auto moved = relabel(rng, net, state);
    const double again = flow_based_resilience(moved.net, moved.state).value;
    if (!close(again, value, 1e-12)) return fmt::format("case {}: {} became {} after relabelling", c, value, again);
    ++c;
  }
  return {};
}

inline std::string user_severity_suite(std::uint64_t seed, int cases = kPropertyCases) {
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    auto s = random_series(rng, 1, pick(rng, 1, 10));
    for (std::size_t t = 0; t < s.steps; ++t) s.demand[t] = std::max(s.demand[t], 0.001);
    const double v = user_severity(s, "n0").value;
    double lowest = 1.0;
    for (std::size_t t = 0; t < s.steps; ++t) lowest = std::min(lowest, s.delivered[t] / s.demand[t]);
    if (v < 0.0 || v > 1.0) return fmt::format("case {}: severity {} outside [0, 1]", c, v);
    if (v != lowest) return fmt::format("case {}: severity {} is not the minimum ratio {}", c, v, lowest);
  }
  return {};
}

inline std::string wpr_single_flip_suite(std::uint64_t seed, int cases = kPropertyCases) {
  const auto checklist = default_wpr_checklist();
  std::vector<std::string> names;
  for (const auto& cat : checklist.categories) {
    for (const auto& crit : cat.criteria) names.push_back(crit.name);
  }
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases;) {
    WprAnswers answers;
    for (const auto& name : names) answers[name] = coin(rng, 0.5);
    const auto& flip = names[pick(rng, 0, names.size() - 1)];
    if (answers[flip]) continue;
    const std::size_t before = wpr_score(checklist, answers);
    answers[flip] = true;
    const std::size_t after = wpr_score(checklist, answers);
    if (after != before + 1) return fmt::format("case {}: flipping {} moved {} to {}", c, flip, before, after);
    ++c;
  }
  return {};
}

}  // namespace wdsr::test
