#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "wdsr/hydraulic.hpp"
#include "wdsr/network.hpp"

namespace wdsr {

/// One critical event, active on steps onset <= t < repair. Repair is
/// instantaneous; without a repair step the event lasts to the horizon.
struct ScenarioEvent {
  enum class Type { PipeFailure, PumpFailure, DemandScale, SupplyScale };

  Type type = Type::PipeFailure;
  /// Failed pipes/pumps, or the junctions/sources a scale applies to
  /// (empty: all of them).
  std::vector<std::string> ids;
  /// Pipe failures only: pick this many distinct pipes at random instead of
  /// listing ids.
  std::size_t random_count = 0;
  double factor = 1.0;
  std::size_t onset = 0;
  std::optional<std::size_t> repair;

  [[nodiscard]] bool active(std::size_t t) const { return t >= onset && (!repair || t < *repair); }
  [[nodiscard]] bool is_random() const { return type == Type::PipeFailure && random_count > 0; }
};

struct ScenarioSpec {
  std::vector<ScenarioEvent> events;
  std::uint64_t seed = 0;

  [[nodiscard]] bool has_random_events() const;
  /// Checks factors, timing and that every referenced id exists.
  void validate(const Network& net) const;
};

ScenarioSpec parse_scenario(std::string_view json_text, const std::string& origin);
ScenarioSpec load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioSpec& spec);

/// Reproducible bounded draws from a 64-bit Mersenne Twister. Rejection
/// sampling keeps results identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Number of joint outcomes of the random events in exhaustive mode: the
/// product of C(pipes, random_count) over random events.
std::uint64_t exhaustive_outcomes(const Network& net, const ScenarioSpec& spec);

/// Replaces random pipe failures by concrete pipe ids drawn from `rng`.
ScenarioSpec resolve_random(const Network& net, const ScenarioSpec& spec, Rng& rng);
/// Replaces random pipe failures by the `outcome`-th joint combination
/// (mixed radix over events, lexicographic pipe ids within an event).
ScenarioSpec resolve_exhaustive(const Network& net, const ScenarioSpec& spec,
                                std::uint64_t outcome);

/// Runs the surrogate allocator once per step under the active events.
/// Random events are resolved with the spec's seed.
HydraulicSeries apply_scenario(const Network& net, const ScenarioSpec& spec, std::size_t horizon);

// ---- Monte Carlo -----------------------------------------------------------

enum class McMetric { Zhuang, Hashimoto, FlowBased, Todini, Severity };

McMetric parse_mc_metric(std::string_view name);
std::string_view to_string(McMetric metric);
std::vector<std::string> mc_metric_names();

struct MonteCarloOptions {
  std::size_t replicates = 1;
  std::size_t horizon = 1;
  std::size_t threads = 1;
  /// Replicate r uses joint outcome r mod exhaustive_outcomes() instead of
  /// random draws.
  bool exhaustive = false;
  /// Satisfactory threshold for the hashimoto metric.
  double threshold = 0.9;
};

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double p05 = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
};

/// Summary in replicate order; quantiles interpolate linearly between
/// order statistics.
Summary summarize(const std::vector<double>& values);

struct MonteCarloResult {
  std::string metric;
  std::uint64_t seed = 0;
  std::size_t horizon = 1;
  bool exhaustive = false;
  std::vector<std::uint64_t> replicate_seeds;
  std::vector<double> values;
  Summary summary;
};

/// Replicate r draws from Rng(seed ^ r), so replicates are independent of
/// evaluation order and thread count.
MonteCarloResult monte_carlo(const Network& net, const ScenarioSpec& spec, McMetric metric,
                             const MonteCarloOptions& options);

/// Evaluates one MC metric on a scenario series.
double evaluate_mc_metric(const Network& net, const HydraulicSeries& series, McMetric metric,
                          double threshold);

std::string monte_carlo_to_json(const MonteCarloResult& result);
std::string monte_carlo_to_csv(const MonteCarloResult& result);

}  // namespace wdsr
