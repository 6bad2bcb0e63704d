#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <fmt/core.h>

#include "wdsr/errors.hpp"
#include "wdsr/hydraulic.hpp"

namespace wdsr {

namespace {

// Residual network for Edmonds-Karp. Arcs come in pairs (2k, 2k+1). For a
// directed arc the partner has capacity 0; for an undirected pipe both
// directions carry the pipe capacity and flow on one is minus the other.
class FlowGraph {
 public:
  explicit FlowGraph(std::size_t nodes) : out_(nodes) {}

  std::size_t add(std::size_t from, std::size_t to, double cap, double reverse_cap) {
    const std::size_t id = arcs_.size();
    arcs_.push_back({to, cap, 0.0});
    arcs_.push_back({from, reverse_cap, 0.0});
    out_[from].push_back(id);
    out_[to].push_back(id + 1);
    return id;
  }

  [[nodiscard]] double flow(std::size_t arc) const { return arcs_[arc].flow; }

  // Shortest augmenting paths; adjacency order fixes which of several
  // equal-length paths is used, so results are reproducible.
  void run(std::size_t source, std::size_t sink, double eps) {
    std::vector<std::size_t> via(out_.size());
    std::vector<bool> seen(out_.size());
    for (;;) {
      std::fill(seen.begin(), seen.end(), false);
      std::queue<std::size_t> frontier;
      frontier.push(source);
      seen[source] = true;
      while (!frontier.empty() && !seen[sink]) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t a : out_[u]) {
          const auto& arc = arcs_[a];
          if (!seen[arc.to] && residual(a) > eps) {
            seen[arc.to] = true;
            via[arc.to] = a;
            frontier.push(arc.to);
          }
        }
      }
      if (!seen[sink]) return;
      double push = std::numeric_limits<double>::infinity();
      for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        push = std::min(push, residual(via[v]));
      }
      for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].flow += push;
        arcs_[via[v] ^ 1].flow -= push;
      }
    }
  }

 private:
  struct Arc {
    std::size_t to;
    double cap;
    double flow;
  };

  [[nodiscard]] double residual(std::size_t a) const {
    const auto& arc = arcs_[a];
    return std::isinf(arc.cap) ? arc.cap : arc.cap - arc.flow;
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> out_;
};

double factor(const std::vector<double>& scale, std::size_t i, const char* what) {
  if (scale.empty()) return 1.0;
  const double f = scale.at(i);
  if (!(std::isfinite(f) && f >= 0.0)) {
    throw ValidationError(fmt::format("{} factor must be finite and >= 0", what));
  }
  return f;
}

}  // namespace

double Allocation::total_delivered() const {
  double total = 0.0;
  for (double d : delivered) total += d;
  return total;
}

Allocation allocate(const Network& net, const AllocationRequest& request) {
  const std::size_t nj = net.junction_count();
  const std::size_t ns = net.source_count();
  if (!request.demand_scale.empty() && request.demand_scale.size() != nj) {
    throw ValidationError("demand_scale must have one entry per junction");
  }
  if (!request.supply_scale.empty() && request.supply_scale.size() != ns) {
    throw ValidationError("supply_scale must have one entry per source");
  }
  if (request.failures.pipes.size() != net.pipe_count() ||
      request.failures.pumps.size() != net.pump_count()) {
    throw ValidationError("failure set does not match the network");
  }

  Allocation result;
  result.demand.resize(nj);
  double scale_sum = 0.0;
  for (std::size_t i = 0; i < nj; ++i) {
    result.demand[i] = net.junctions()[i].design_demand * factor(request.demand_scale, i, "demand");
    scale_sum += result.demand[i];
  }

  const auto active = active_sources(net, request.failures.pumps);
  const std::size_t super_source = net.node_count();
  const std::size_t sink = super_source + 1;
  FlowGraph graph(net.node_count() + 2);

  std::vector<std::size_t> source_arc(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const double cap = active[s] ? net.sources()[s].outflow * factor(request.supply_scale, s, "supply") : 0.0;
    source_arc[s] = graph.add(super_source, net.source_node(s), cap, 0.0);
  }

  // Pipes are added in ascending id order so the search prefers them that way.
  std::vector<std::size_t> pipe_arc(net.pipe_count(), 0);
  std::vector<bool> has_arc(net.pipe_count(), false);
  for (std::size_t p : net.pipes_by_id()) {
    if (request.failures.pipes[p]) continue;
    const auto [a, b] = net.endpoints(p);
    const double cap = net.pipes()[p].capacity;
    pipe_arc[p] = graph.add(a, b, cap, cap);
    has_arc[p] = true;
  }

  std::vector<std::size_t> demand_arc(nj);
  for (std::size_t i = 0; i < nj; ++i) demand_arc[i] = graph.add(i, sink, result.demand[i], 0.0);

  const double eps = 1e-12 * std::max(scale_sum, 1e-300);
  graph.run(super_source, sink, eps);

  const auto reachable = reachable_from_sources(net, request.failures);
  result.delivered.resize(nj);
  result.supplied.resize(nj);
  for (std::size_t i = 0; i < nj; ++i) {
    const double d = std::clamp(graph.flow(demand_arc[i]), 0.0, result.demand[i]);
    result.delivered[i] = d;
    result.supplied[i] = reachable[i] && d >= result.demand[i] * (1.0 - 1e-9);
  }
  result.pipe_flow.resize(net.pipe_count(), 0.0);
  for (std::size_t p = 0; p < net.pipe_count(); ++p) {
    if (has_arc[p]) result.pipe_flow[p] = graph.flow(pipe_arc[p]);
  }
  result.source_outflow.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) result.source_outflow[s] = graph.flow(source_arc[s]);
  return result;
}

HydraulicSeries allocation_series(const Network& net, const Allocation& allocation) {
  std::vector<std::string> ids;
  ids.reserve(net.junction_count());
  for (const auto& j : net.junctions()) ids.push_back(j.id);
  auto series = HydraulicSeries::zeros(std::move(ids), 1);
  for (std::size_t i = 0; i < net.junction_count(); ++i) {
    const double h_req = net.junctions()[i].required_head;
    series.delivered[i] = allocation.delivered[i];
    series.demand[i] = allocation.demand[i];
    series.required_head[i] = h_req;
    series.head[i] = allocation.supplied[i] ? h_req : 0.0;
  }
  return series;
}

HydraulicSeries surrogate_allocation(const Network& net, double demand_scale,
                                     const std::set<std::string>& failed_pipes,
                                     const std::set<std::string>& failed_pumps) {
  if (!(std::isfinite(demand_scale) && demand_scale > 0.0)) {
    throw ValidationError("demand scale must be > 0");
  }
  AllocationRequest request;
  request.demand_scale.assign(net.junction_count(), demand_scale);
  request.failures = FailureSet::from_ids(net, failed_pipes, failed_pumps);
  return allocation_series(net, allocate(net, request));
}

}  // namespace wdsr
