#pragma once

#include <string_view>

#include "wdsr/hydraulic.hpp"
#include "wdsr/metric_value.hpp"
#include "wdsr/network.hpp"

namespace wdsr {

/// Specific weight of water, N/m^3.
inline constexpr double kWaterSpecificWeight = 9810.0;

inline constexpr const char* kNoFailureObserved = "no_failure_observed";

/// Average recovery rate gamma = rho / (1 - alpha), estimated from a single
/// trajectory: alpha = #S / T over the states, rho = #(S at t, F at t+1) /
/// (T - 1) over transition pairs. Short series can give gamma > 1; the raw
/// value is returned with a warning. A series without failures yields 1 and
/// the kNoFailureObserved flag.
MetricValue hashimoto_recovery(const BinaryStateSeries& states);

/// Total delivered over total demanded flow across nodes and the window.
/// Throws UndefinedInputError when total demand is zero.
MetricValue zhuang_availability(const HydraulicSeries& series);

/// P_f = 1 - exp(-RR * L).
double pipe_fragility(const Pipe& pipe);

/// Flow-based resilience: per node the reliability factor sum(1 - P_f) over
/// incident pipes weights q*(h - h*); normalised by 4 * sum(q* h*). Series
/// nodes must be exactly the network junctions.
MetricValue flow_based_resilience(const Network& net, const HydraulicSeries& series);

/// supply / demand, uncapped. Throws UndefinedInputError for demand 0.
double user_functionality(double supply, double demand);

/// Minimum user functionality of one node over the window.
MetricValue user_severity(const HydraulicSeries& series, std::string_view node_id);

/// Todini resilience index for a one-step state:
///   sum q*(h - h*) / (sum Q_k H_k + sum P_j / gamma_w - sum q* h*).
/// Demand and heads come from the state, Q_k, H_k and P_j from the network.
/// Throws InfeasibleDesignError when the denominator is not positive.
MetricValue todini_index(const Network& net, const HydraulicSeries& state);

}  // namespace wdsr
