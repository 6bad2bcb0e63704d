#include "wdsr/buffering.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "wdsr/errors.hpp"

namespace wdsr {

std::vector<Component> failable_components(const Network& net) {
  std::vector<Component> out;
  for (std::size_t p : net.pipes_by_id()) out.push_back({Component::Kind::Pipe, p});
  std::vector<std::size_t> pumps(net.pump_count());
  for (std::size_t i = 0; i < pumps.size(); ++i) pumps[i] = i;
  std::sort(pumps.begin(), pumps.end(),
            [&](std::size_t a, std::size_t b) { return net.pumps()[a].id < net.pumps()[b].id; });
  for (std::size_t p : pumps) out.push_back({Component::Kind::Pump, p});
  return out;
}

std::string component_id(const Network& net, const Component& c) {
  return c.kind == Component::Kind::Pipe ? net.pipes()[c.index].id : net.pumps()[c.index].id;
}

BufferingResult buffering_capacity(const Network& net, const FeasibilityOracle& feasible,
                                   std::size_t max_k) {
  const auto components = failable_components(net);
  if (max_k > components.size()) {
    throw ValidationError(fmt::format("max_k {} exceeds the {} failable components", max_k,
                                      components.size()));
  }
  BufferingResult result;
  result.max_k = max_k;

  FailureSet failures = FailureSet::none(net);
  ++result.sets_evaluated;
  if (!feasible(failures)) {
    throw BaselineInfeasibleError("intact network does not meet the feasibility criterion");
  }

  auto set_mask = [&](const std::vector<std::size_t>& pick, bool value) {
    for (std::size_t i : pick) {
      const auto& c = components[i];
      if (c.kind == Component::Kind::Pipe) {
        failures.pipes[c.index] = value;
      } else {
        failures.pumps[c.index] = value;
      }
    }
  };

  const std::size_t n = components.size();
  for (std::size_t size = 1; size <= max_k; ++size) {
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    for (;;) {
      set_mask(pick, true);
      ++result.sets_evaluated;
      const bool ok = feasible(failures);
      set_mask(pick, false);
      if (!ok) {
        result.k = size - 1;
        std::vector<Component> witness;
        for (std::size_t i : pick) witness.push_back(components[i]);
        result.witness = std::move(witness);
        return result;
      }
      // Next combination in lexicographic order.
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == n - size + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  result.k = max_k;
  return result;
}

FeasibilityOracle connectivity_oracle(const Network& net) {
  return [&net](const FailureSet& failures) {
    const auto reach = reachable_from_sources(net, failures);
    for (std::size_t i = 0; i < net.junction_count(); ++i) {
      if (!reach[i]) return false;
    }
    return true;
  };
}

FeasibilityOracle service_oracle(const Network& net, double threshold, ThresholdMode mode) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ValidationError(fmt::format("threshold {} outside (0, 1]", threshold));
  }
  return [&net, threshold, mode](const FailureSet& failures) {
    AllocationRequest request;
    request.failures = failures;
    const auto series = allocation_series(net, allocate(net, request));
    return classify_states(series, threshold, mode).states.front() == State::Satisfactory;
  };
}

}  // namespace wdsr
