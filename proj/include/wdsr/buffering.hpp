#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wdsr/hydraulic.hpp"
#include "wdsr/network.hpp"

namespace wdsr {

/// A failable component. Valves are not modelled.
struct Component {
  enum class Kind { Pipe, Pump };
  Kind kind;
  std::size_t index;

  friend bool operator==(const Component&, const Component&) = default;
};

/// Pipes in ascending id order, then pumps in ascending id order.
std::vector<Component> failable_components(const Network& net);

std::string component_id(const Network& net, const Component& c);

/// Decides whether the network still meets its minimum functional
/// performance with the given components failed. Must be pure.
using FeasibilityOracle = std::function<bool(const FailureSet&)>;

struct BufferingResult {
  std::size_t k = 0;
  std::size_t max_k = 0;
  /// First violating failure set of size k+1, when k < max_k.
  std::optional<std::vector<Component>> witness;
  std::size_t sets_evaluated = 0;
};

/// Largest k <= max_k such that every failure set of at most k components
/// is feasible. Subsets are enumerated exhaustively in lexicographic order,
/// so cost grows as C(n, k). Throws BaselineInfeasibleError when the intact
/// network is infeasible and ValidationError when max_k exceeds the number
/// of failable components.
BufferingResult buffering_capacity(const Network& net, const FeasibilityOracle& feasible,
                                   std::size_t max_k = 2);

/// Feasible iff every junction stays connected to an active source.
FeasibilityOracle connectivity_oracle(const Network& net);

/// Feasible iff the surrogate allocation under design demand is
/// satisfactory at the given threshold.
FeasibilityOracle service_oracle(const Network& net, double threshold,
                                 ThresholdMode mode = ThresholdMode::System);

}  // namespace wdsr
