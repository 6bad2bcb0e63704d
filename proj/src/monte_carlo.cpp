#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <fmt/core.h>
#include <json.hpp>

#include "wdsr/errors.hpp"
#include "wdsr/metrics_performance.hpp"
#include "wdsr/scenario.hpp"

namespace wdsr {

namespace {

struct MetricName {
  McMetric metric;
  const char* name;
};

constexpr MetricName kMetricNames[] = {
    {McMetric::Zhuang, "zhuang"},   {McMetric::Hashimoto, "hashimoto"},
    {McMetric::FlowBased, "fr"},    {McMetric::Todini, "todini"},
    {McMetric::Severity, "severity"},
};

double quantile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

McMetric parse_mc_metric(std::string_view name) {
  for (const auto& m : kMetricNames) {
    if (name == m.name) return m.metric;
  }
  throw ValidationError(fmt::format("unknown Monte Carlo metric '{}' (valid: zhuang, hashimoto, fr, todini, severity)", name));
}

std::string_view to_string(McMetric metric) {
  for (const auto& m : kMetricNames) {
    if (m.metric == metric) return m.name;
  }
  return "";
}

std::vector<std::string> mc_metric_names() {
  std::vector<std::string> out;
  for (const auto& m : kMetricNames) out.emplace_back(m.name);
  return out;
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("cannot summarise zero replicates");
  Summary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.p05 = quantile(sorted, 0.05);
  s.p25 = quantile(sorted, 0.25);
  s.p50 = quantile(sorted, 0.50);
  s.p75 = quantile(sorted, 0.75);
  s.p95 = quantile(sorted, 0.95);
  return s;
}

double evaluate_mc_metric(const Network& net, const HydraulicSeries& series, McMetric metric,
                          double threshold) {
  switch (metric) {
    case McMetric::Zhuang:
      return zhuang_availability(series).value;
    case McMetric::Hashimoto:
      return hashimoto_recovery(classify_states(series, threshold)).value;
    case McMetric::FlowBased:
      return flow_based_resilience(net, series).value;
    case McMetric::Todini: {
      double sum = 0.0;
      HydraulicSeries step = series;
      for (std::size_t t = series.window_begin; t < series.window_end; ++t) {
        step.set_window(t, t + 1);
        sum += todini_index(net, step).value;
      }
      return sum / static_cast<double>(series.window_end - series.window_begin);
    }
    case McMetric::Severity: {
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < series.node_count(); ++i) {
        bool has_demand = true;
        for (std::size_t t = series.window_begin; t < series.window_end; ++t) {
          has_demand = has_demand && series.demand[series.at(t, i)] > 0.0;
        }
        if (has_demand) lowest = std::min(lowest, user_severity(series, series.node_ids[i]).value);
      }
      if (std::isinf(lowest)) throw UndefinedInputError("no junction has demand at every step");
      return lowest;
    }
  }
  return 0.0;
}

MonteCarloResult monte_carlo(const Network& net, const ScenarioSpec& spec, McMetric metric,
                             const MonteCarloOptions& options) {
  if (options.replicates == 0) throw ValidationError("replicate count must be >= 1");
  if (options.horizon == 0) throw ValidationError("horizon must be >= 1");
  spec.validate(net);

  MonteCarloResult result;
  result.metric = std::string(to_string(metric));
  result.seed = spec.seed;
  result.horizon = options.horizon;
  result.exhaustive = options.exhaustive;
  result.values.assign(options.replicates, 0.0);
  result.replicate_seeds.resize(options.replicates);
  for (std::size_t r = 0; r < options.replicates; ++r) result.replicate_seeds[r] = spec.seed ^ r;

  std::vector<std::exception_ptr> errors(options.replicates);
  auto run = [&](std::size_t r) {
    try {
      ScenarioSpec concrete;
      if (options.exhaustive) {
        concrete = resolve_exhaustive(net, spec, r);
      } else {
        Rng rng(result.replicate_seeds[r]);
        concrete = resolve_random(net, spec, rng);
      }
      const auto series = apply_scenario(net, concrete, options.horizon);
      result.values[r] = evaluate_mc_metric(net, series, metric, options.threshold);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, options.replicates);
  if (threads == 1) {
    for (std::size_t r = 0; r < options.replicates; ++r) run(r);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < options.replicates; r += threads) run(r);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  result.summary = summarize(result.values);
  return result;
}

std::string monte_carlo_to_json(const MonteCarloResult& result) {
  nlohmann::ordered_json doc;
  doc["metric"] = result.metric;
  doc["seed"] = result.seed;
  doc["replicates"] = result.values.size();
  doc["horizon"] = result.horizon;
  doc["exhaustive"] = result.exhaustive;
  doc["summary"] = {{"mean", result.summary.mean}, {"min", result.summary.min},
                    {"max", result.summary.max},   {"p05", result.summary.p05},
                    {"p25", result.summary.p25},   {"p50", result.summary.p50},
                    {"p75", result.summary.p75},   {"p95", result.summary.p95}};
  doc["values"] = result.values;
  return doc.dump(2) + "\n";
}

std::string monte_carlo_to_csv(const MonteCarloResult& result) {
  std::string out = "replicate,seed,value\n";
  for (std::size_t r = 0; r < result.values.size(); ++r) {
    out += fmt::format("{},{},{}\n", r, result.replicate_seeds[r], result.values[r]);
  }
  return out;
}

}  // namespace wdsr
