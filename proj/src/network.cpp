#include "wdsr/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include <fmt/core.h>

#include "wdsr/digest.hpp"
#include "wdsr/errors.hpp"

namespace wdsr {

FlowUnits parse_flow_units(std::string_view text) {
  if (text == "m3s") return FlowUnits::CubicMetresPerSecond;
  if (text == "lps") return FlowUnits::LitresPerSecond;
  throw ValidationError(fmt::format("unknown flow units '{}' (expected lps or m3s)", text));
}

std::string_view to_string(FlowUnits units) {
  return units == FlowUnits::LitresPerSecond ? "lps" : "m3s";
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Network Network::build(std::vector<Junction> junctions, std::vector<Source> sources,
                       std::vector<Pump> pumps, std::vector<Pipe> pipes) {
  require(!junctions.empty(), "network needs at least one junction");
  require(!sources.empty(), "network needs at least one source");

  Network net;
  net.junctions_ = std::move(junctions);
  net.sources_ = std::move(sources);
  net.pumps_ = std::move(pumps);
  net.pipes_ = std::move(pipes);

  auto add_node = [&](const std::string& id, std::size_t index) {
    require(!id.empty(), "node with empty id");
    require(net.node_lookup_.emplace(id, index).second, fmt::format("duplicate node id '{}'", id));
  };
  for (std::size_t i = 0; i < net.junctions_.size(); ++i) {
    const auto& j = net.junctions_[i];
    add_node(j.id, i);
    require(finite(j.elevation), fmt::format("junction '{}': elevation must be finite", j.id));
    require(finite(j.design_demand) && j.design_demand >= 0.0,
            fmt::format("junction '{}': design_demand must be >= 0", j.id));
    require(finite(j.required_head) && j.required_head >= 0.0,
            fmt::format("junction '{}': required_head must be >= 0", j.id));
  }
  for (std::size_t s = 0; s < net.sources_.size(); ++s) {
    const auto& src = net.sources_[s];
    add_node(src.id, net.junctions_.size() + s);
    require(finite(src.total_head) && src.total_head > 0.0,
            fmt::format("source '{}': total_head must be > 0", src.id));
    require(finite(src.outflow) && src.outflow >= 0.0,
            fmt::format("source '{}': outflow must be >= 0", src.id));
  }

  for (std::size_t p = 0; p < net.pumps_.size(); ++p) {
    const auto& pump = net.pumps_[p];
    require(!pump.id.empty(), "pump with empty id");
    require(net.pump_lookup_.emplace(pump.id, p).second,
            fmt::format("duplicate pump id '{}'", pump.id));
    require(finite(pump.power) && pump.power >= 0.0,
            fmt::format("pump '{}': power must be >= 0", pump.id));
    if (pump.source) {
      auto it = net.node_lookup_.find(*pump.source);
      require(it != net.node_lookup_.end() && net.is_source(it->second),
              fmt::format("pump '{}': '{}' is not a source", pump.id, *pump.source));
    }
  }

  net.incident_.resize(net.node_count());
  net.ends_.reserve(net.pipes_.size());
  for (std::size_t k = 0; k < net.pipes_.size(); ++k) {
    const auto& pipe = net.pipes_[k];
    require(!pipe.id.empty(), "pipe with empty id");
    require(net.pipe_lookup_.emplace(pipe.id, k).second,
            fmt::format("duplicate pipe id '{}'", pipe.id));
    auto a = net.node_lookup_.find(pipe.from);
    auto b = net.node_lookup_.find(pipe.to);
    require(a != net.node_lookup_.end(),
            fmt::format("pipe '{}': unknown node '{}'", pipe.id, pipe.from));
    require(b != net.node_lookup_.end(),
            fmt::format("pipe '{}': unknown node '{}'", pipe.id, pipe.to));
    require(a->second != b->second, fmt::format("pipe '{}': self-loop on '{}'", pipe.id, pipe.from));
    require(finite(pipe.length) && pipe.length > 0.0,
            fmt::format("pipe '{}': length must be > 0", pipe.id));
    require(finite(pipe.diameter) && pipe.diameter > 0.0,
            fmt::format("pipe '{}': diameter must be > 0", pipe.id));
    require(finite(pipe.friction_factor) && pipe.friction_factor > 0.0,
            fmt::format("pipe '{}': friction_factor must be > 0", pipe.id));
    require(finite(pipe.repair_rate) && pipe.repair_rate >= 0.0,
            fmt::format("pipe '{}': repair_rate must be >= 0", pipe.id));
    require(!std::isnan(pipe.capacity) && pipe.capacity >= 0.0,
            fmt::format("pipe '{}': capacity must be >= 0", pipe.id));
    net.ends_.emplace_back(a->second, b->second);
  }

  net.pipe_order_.resize(net.pipes_.size());
  std::iota(net.pipe_order_.begin(), net.pipe_order_.end(), std::size_t{0});
  std::sort(net.pipe_order_.begin(), net.pipe_order_.end(),
            [&](std::size_t x, std::size_t y) { return net.pipes_[x].id < net.pipes_[y].id; });
  net.pipe_rank_.resize(net.pipes_.size());
  for (std::size_t r = 0; r < net.pipe_order_.size(); ++r) net.pipe_rank_[net.pipe_order_[r]] = r;

  for (std::size_t k : net.pipe_order_) {
    net.incident_[net.ends_[k].first].push_back(k);
    net.incident_[net.ends_[k].second].push_back(k);
  }
  return net;
}

std::optional<std::size_t> Network::find_node(std::string_view id) const {
  auto it = node_lookup_.find(std::string(id));
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t Network::node_index(std::string_view id) const {
  auto found = find_node(id);
  if (!found) throw ValidationError(fmt::format("unknown node id '{}'", id));
  return *found;
}

std::size_t Network::pipe_index(std::string_view id) const {
  auto it = pipe_lookup_.find(std::string(id));
  if (it == pipe_lookup_.end()) throw ValidationError(fmt::format("unknown pipe id '{}'", id));
  return it->second;
}

std::size_t Network::pump_index(std::string_view id) const {
  auto it = pump_lookup_.find(std::string(id));
  if (it == pump_lookup_.end()) throw ValidationError(fmt::format("unknown pump id '{}'", id));
  return it->second;
}

const std::string& Network::node_id(std::size_t node) const {
  return is_source(node) ? sources_[node - junctions_.size()].id : junctions_[node].id;
}

std::size_t Network::other_end(std::size_t pipe, std::size_t node) const {
  const auto [a, b] = ends_[pipe];
  return a == node ? b : a;
}

double Network::total_design_demand() const {
  double total = 0.0;
  for (const auto& j : junctions_) total += j.design_demand;
  return total;
}

std::string Network::digest() const {
  Digest d;
  for (const auto& j : junctions_) {
    d.update(j.id).update(j.elevation).update(j.design_demand).update(j.required_head);
  }
  for (const auto& s : sources_) d.update(s.id).update(s.total_head).update(s.outflow);
  for (const auto& p : pumps_) d.update(p.id).update(p.power).update(p.source.value_or(""));
  for (const auto& p : pipes_) {
    d.update(p.id).update(p.from).update(p.to).update(p.length).update(p.diameter);
    d.update(p.friction_factor).update(p.repair_rate).update(p.capacity);
  }
  return d.hex();
}

FailureSet FailureSet::none(const Network& net) {
  return FailureSet{std::vector<bool>(net.pipe_count(), false),
                    std::vector<bool>(net.pump_count(), false)};
}

FailureSet FailureSet::from_ids(const Network& net, const std::set<std::string>& pipe_ids,
                                const std::set<std::string>& pump_ids) {
  FailureSet f = none(net);
  for (const auto& id : pipe_ids) f.pipes[net.pipe_index(id)] = true;
  for (const auto& id : pump_ids) f.pumps[net.pump_index(id)] = true;
  return f;
}

std::size_t FailureSet::failed_pipe_count() const {
  return static_cast<std::size_t>(std::count(pipes.begin(), pipes.end(), true));
}

std::size_t node_degree(const Network& net, std::string_view node_id) {
  return net.incident_pipes(net.node_index(node_id)).size();
}

std::vector<bool> active_sources(const Network& net, const std::vector<bool>& failed_pumps) {
  std::vector<bool> active(net.source_count(), true);
  for (std::size_t p = 0; p < net.pump_count(); ++p) {
    const auto& pump = net.pumps()[p];
    if (failed_pumps.at(p) && pump.source) {
      active[net.node_index(*pump.source) - net.junction_count()] = false;
    }
  }
  return active;
}

std::vector<bool> reachable_from_sources(const Network& net, const FailureSet& failures) {
  std::vector<bool> seen(net.node_count(), false);
  std::queue<std::size_t> frontier;
  const auto active = active_sources(net, failures.pumps);
  for (std::size_t s = 0; s < net.source_count(); ++s) {
    if (!active[s]) continue;
    seen[net.source_node(s)] = true;
    frontier.push(net.source_node(s));
  }
  while (!frontier.empty()) {
    const std::size_t node = frontier.front();
    frontier.pop();
    for (std::size_t pipe : net.incident_pipes(node)) {
      if (failures.pipes[pipe]) continue;
      const std::size_t next = net.other_end(pipe, node);
      if (!seen[next]) {
        seen[next] = true;
        frontier.push(next);
      }
    }
  }
  return seen;
}

bool is_connected_to_source(const Network& net, std::string_view node_id,
                            const std::set<std::string>& failed_pipes) {
  const std::size_t node = net.node_index(node_id);
  const auto failures = FailureSet::from_ids(net, failed_pipes);
  return reachable_from_sources(net, failures)[node];
}

}  // namespace wdsr
