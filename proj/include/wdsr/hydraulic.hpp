#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wdsr/network.hpp"

namespace wdsr {

/// Per-junction hydraulic time series, stored row-major by timestep.
/// Metrics only look at steps in [window_begin, window_end).
struct HydraulicSeries {
  double step_seconds = 1.0;
  std::vector<std::string> node_ids;
  std::size_t steps = 0;
  std::vector<double> delivered;      ///< Q_{i,t}, m^3/s
  std::vector<double> demand;         ///< Q*_{i,t}, m^3/s
  std::vector<double> head;           ///< h_{i,t}, m
  std::vector<double> required_head;  ///< h*_{i,t}, m
  std::size_t window_begin = 0;
  std::size_t window_end = 0;

  /// Zero-filled series over the given nodes and steps, full window.
  static HydraulicSeries zeros(std::vector<std::string> node_ids, std::size_t steps);

  [[nodiscard]] std::size_t node_count() const { return node_ids.size(); }
  [[nodiscard]] std::size_t at(std::size_t t, std::size_t i) const { return t * node_ids.size() + i; }
  /// Column of a node id; throws ValidationError when absent.
  [[nodiscard]] std::size_t node_column(std::string_view id) const;

  /// Restricts the analysis window; throws ValidationError unless
  /// begin < end <= steps.
  void set_window(std::size_t begin, std::size_t end);

  /// Checks shapes, non-negative flows, unique node ids and the window.
  void validate() const;

  [[nodiscard]] std::string digest() const;
};

/// Reads `t,node_id,delivered_m3s,demand_m3s,head_m,required_head_m`.
/// `t` is the integer step index, contiguous from 0; every step must list
/// the same node set.
HydraulicSeries load_series(const std::filesystem::path& path, double step_seconds = 1.0);
HydraulicSeries parse_series(std::string_view csv_text, const std::string& origin,
                             double step_seconds = 1.0);
std::string series_to_csv(const HydraulicSeries& series);
void save_series(const HydraulicSeries& series, const std::filesystem::path& path);

enum class State { Satisfactory, Failure };

enum class ThresholdMode {
  System,   ///< total delivered / total demand per step
  PerNode,  ///< every node with demand must meet the ratio
};

struct BinaryStateSeries {
  std::vector<State> states;
  double threshold = 1.0;
  ThresholdMode mode = ThresholdMode::System;

  [[nodiscard]] std::size_t count(State s) const;
};

/// Thresholds the supply/demand ratio per step over the window. A step with
/// zero demand is satisfactory.
BinaryStateSeries classify_states(const HydraulicSeries& series, double threshold,
                                  ThresholdMode mode = ThresholdMode::System);

// ---- surrogate allocator --------------------------------------------------

struct AllocationRequest {
  /// Per-junction demand multiplier; empty means 1 everywhere.
  std::vector<double> demand_scale;
  /// Per-source outflow multiplier; empty means 1 everywhere.
  std::vector<double> supply_scale;
  FailureSet failures;
};

/// Max-flow allocation from sources (capacity Q) through intact pipes to
/// junction demands.
struct Allocation {
  std::vector<double> demand;          ///< scaled demand per junction
  std::vector<double> delivered;       ///< per junction, <= demand
  std::vector<double> pipe_flow;       ///< signed, positive from -> to
  std::vector<double> source_outflow;  ///< per source
  std::vector<bool> supplied;          ///< demand met and connected

  [[nodiscard]] double total_delivered() const;
};

Allocation allocate(const Network& net, const AllocationRequest& request);

/// Converts an allocation to a one-step series. Supplied junctions get
/// h = h*, all others h = 0; these heads are a stand-in, not hydraulics.
HydraulicSeries allocation_series(const Network& net, const Allocation& allocation);

/// One-step series for a uniformly scaled demand and the given failures.
HydraulicSeries surrogate_allocation(const Network& net, double demand_scale,
                                     const std::set<std::string>& failed_pipes,
                                     const std::set<std::string>& failed_pumps = {});

}  // namespace wdsr
