// Shared helpers for the test binaries: fixture paths, random network
// generation and brute-force reference implementations.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "wdsr/network.hpp"

namespace wdsr::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(WDSR_TEST_FIXTURES) / name;
}

inline std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(WDSR_TEST_GOLDEN) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

struct RandomNetworkOptions {
  std::size_t max_nodes = 8;
  std::size_t max_sources = 2;
  /// f = D = 1 and integer lengths, so many path resistances tie exactly.
  bool integer_resistance = false;
  /// Chance that a node is left off the spanning tree.
  double detach_probability = 0.1;
  double unlimited_capacity_probability = 0.4;
  std::size_t max_pumps = 1;
};

/// Small random multigraph network; pipe ids are shuffled so id order
/// differs from storage order.
inline Network random_network(std::mt19937_64& rng, const RandomNetworkOptions& opt = {}) {
  const std::size_t n = pick(rng, 2, opt.max_nodes);
  const std::size_t ns = pick(rng, 1, std::min(opt.max_sources, n - 1));
  const std::size_t nj = n - ns;

  std::vector<Junction> junctions;
  for (std::size_t i = 0; i < nj; ++i) {
    junctions.push_back({fmt::format("j{}", i), 0.0, coin(rng, 0.15) ? 0.0 : uniform(rng, 0.001, 0.02),
                         uniform(rng, 10.0, 40.0)});
  }
  std::vector<Source> sources;
  for (std::size_t s = 0; s < ns; ++s) {
    sources.push_back({fmt::format("s{}", s), uniform(rng, 50.0, 120.0), uniform(rng, 0.0, 0.06)});
  }
  std::vector<std::string> ids;
  for (const auto& j : junctions) ids.push_back(j.id);
  for (const auto& s : sources) ids.push_back(s.id);

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 1; i < n; ++i) {
    if (coin(rng, opt.detach_probability)) continue;
    edges.emplace_back(order[i], order[pick(rng, 0, i - 1)]);
  }
  const std::size_t extra = pick(rng, 0, n);
  for (std::size_t e = 0; e < extra; ++e) {
    const std::size_t a = pick(rng, 0, n - 1), b = pick(rng, 0, n - 1);
    if (a != b) edges.emplace_back(a, b);
  }

  std::vector<std::size_t> labels(edges.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i;
  std::shuffle(labels.begin(), labels.end(), rng);

  std::vector<Pipe> pipes;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    Pipe p;
    p.id = fmt::format("p{:02}", labels[e]);
    p.from = ids[edges[e].first];
    p.to = ids[edges[e].second];
    if (opt.integer_resistance) {
      p.length = static_cast<double>(pick(rng, 1, 4));
      p.diameter = 1.0;
      p.friction_factor = 1.0;
    } else {
      p.length = uniform(rng, 50.0, 500.0);
      p.diameter = std::vector<double>{0.1, 0.15, 0.2, 0.3}[pick(rng, 0, 3)];
      p.friction_factor = uniform(rng, 0.01, 0.03);
    }
    p.repair_rate = uniform(rng, 0.0, 0.01);
    p.capacity = coin(rng, opt.unlimited_capacity_probability) ? kUnlimitedCapacity : uniform(rng, 0.0, 0.03);
    pipes.push_back(std::move(p));
  }

  std::vector<Pump> pumps;
  const std::size_t np = pick(rng, 0, opt.max_pumps);
  for (std::size_t k = 0; k < np; ++k) {
    Pump pump{fmt::format("pump{}", k), uniform(rng, 0.0, 3000.0), std::nullopt};
    if (coin(rng, 0.7)) pump.source = sources[pick(rng, 0, ns - 1)].id;
    pumps.push_back(std::move(pump));
  }
  return Network::build(std::move(junctions), std::move(sources), std::move(pumps), std::move(pipes));
}

// ---- reference implementations ---------------------------------------------

struct ReferencePath {
  std::vector<std::size_t> pipes;
  double resistance = 0.0;
};

/// Every simple path between two nodes by depth-first enumeration, sorted
/// by resistance and then by pipe-id sequence.
inline std::vector<ReferencePath> all_simple_paths(const Network& net, std::size_t from, std::size_t to) {
  std::vector<ReferencePath> out;
  if (from == to) {
    out.push_back({});
    return out;
  }
  std::vector<bool> visited(net.node_count(), false);
  std::vector<std::size_t> stack;
  std::function<void(std::size_t, double)> dfs = [&](std::size_t node, double r) {
    if (node == to) {
      out.push_back({stack, r});
      return;
    }
    visited[node] = true;
    for (std::size_t pipe = 0; pipe < net.pipe_count(); ++pipe) {
      const auto [a, b] = net.endpoints(pipe);
      if (a != node && b != node) continue;
      const std::size_t next = a == node ? b : a;
      if (visited[next]) continue;
      stack.push_back(pipe);
      dfs(next, r + net.pipes()[pipe].resistance());
      stack.pop_back();
    }
    visited[node] = false;
  };
  dfs(from, 0.0);
  auto ids = [&](const ReferencePath& p) {
    std::vector<std::string> v;
    for (std::size_t k : p.pipes) v.push_back(net.pipes()[k].id);
    return v;
  };
  std::sort(out.begin(), out.end(), [&](const ReferencePath& x, const ReferencePath& y) {
    if (x.resistance != y.resistance) return x.resistance < y.resistance;
    return ids(x) < ids(y);
  });
  return out;
}

/// Maximum deliverable flow as the minimum over all source-side node sets
/// of the cut capacity (max-flow/min-cut). Exponential; small nets only.
inline double min_cut_flow(const Network& net, const std::vector<bool>& failed_pipes,
                           const std::vector<bool>& failed_pumps, const std::vector<double>& demand_scale = {},
                           const std::vector<double>& supply_scale = {}) {
  const std::size_t n = net.node_count();
  std::vector<double> supply(net.source_count());
  for (std::size_t s = 0; s < net.source_count(); ++s) {
    bool active = true;
    for (std::size_t k = 0; k < net.pump_count(); ++k) {
      if (failed_pumps[k] && net.pumps()[k].source == net.sources()[s].id) active = false;
    }
    supply[s] = active ? net.sources()[s].outflow * (supply_scale.empty() ? 1.0 : supply_scale[s]) : 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    auto in_s = [&](std::size_t v) { return ((mask >> v) & 1U) != 0; };
    double cut = 0.0;
    for (std::size_t s = 0; s < net.source_count(); ++s) {
      if (!in_s(net.source_node(s))) cut += supply[s];
    }
    for (std::size_t j = 0; j < net.junction_count(); ++j) {
      if (in_s(j)) cut += net.junctions()[j].design_demand * (demand_scale.empty() ? 1.0 : demand_scale[j]);
    }
    for (std::size_t p = 0; p < net.pipe_count(); ++p) {
      if (failed_pipes[p]) continue;
      const auto [a, b] = net.endpoints(p);
      if (in_s(a) != in_s(b)) cut += net.pipes()[p].capacity;
    }
    best = std::min(best, cut);
  }
  return best;
}

/// Node reachability from active sources by repeated relaxation.
inline std::vector<bool> reference_reachable(const Network& net, const std::vector<bool>& failed_pipes,
                                             const std::vector<bool>& failed_pumps) {
  std::vector<bool> reach(net.node_count(), false);
  for (std::size_t s = 0; s < net.source_count(); ++s) {
    bool active = true;
    for (std::size_t k = 0; k < net.pump_count(); ++k) {
      if (failed_pumps[k] && net.pumps()[k].source == net.sources()[s].id) active = false;
    }
    if (active) reach[net.source_node(s)] = true;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t p = 0; p < net.pipe_count(); ++p) {
      if (failed_pipes[p]) continue;
      const auto [a, b] = net.endpoints(p);
      if (reach[a] != reach[b]) {
        reach[a] = reach[b] = true;
        changed = true;
      }
    }
  }
  return reach;
}

/// Largest k <= max_k such that `feasible` holds for every failure set of
/// at most k components, by enumerating all bitmasks. Components are the
/// pipes followed by the pumps.
inline std::size_t reference_buffering(const Network& net,
                                       const std::function<bool(const std::vector<bool>&, const std::vector<bool>&)>& feasible,
                                       std::size_t max_k) {
  const std::size_t m = net.pipe_count() + net.pump_count();
  std::size_t smallest_violation = m + 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size > max_k || size >= smallest_violation) continue;
    std::vector<bool> pipes(net.pipe_count()), pumps(net.pump_count());
    for (std::size_t c = 0; c < m; ++c) {
      const bool failed = ((mask >> c) & 1U) != 0;
      if (c < net.pipe_count()) pipes[c] = failed;
      else pumps[c - net.pipe_count()] = failed;
    }
    if (!feasible(pipes, pumps)) smallest_violation = size;
  }
  return smallest_violation > max_k ? max_k : smallest_violation - 1;
}

/// Ward linkage heights from cluster centroids (no recurrence): the merge
/// cost of A and B is sqrt(2 |A||B| / (|A|+|B|)) * ||c_A - c_B||.
inline std::vector<double> centroid_ward_heights(const std::vector<std::vector<double>>& points) {
  struct Cluster {
    std::vector<double> centroid;
    double size;
  };
  std::vector<Cluster> clusters;
  for (const auto& p : points) clusters.push_back({p, 1.0});
  std::vector<double> heights;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double d2 = 0.0;
        for (std::size_t f = 0; f < clusters[i].centroid.size(); ++f) {
          const double d = clusters[i].centroid[f] - clusters[j].centroid[f];
          d2 += d * d;
        }
        const double na = clusters[i].size, nb = clusters[j].size;
        const double cost = std::sqrt(2.0 * na * nb / (na + nb) * d2);
        if (cost < best) {
          best = cost;
          bi = i;
          bj = j;
        }
      }
    }
    Cluster merged{clusters[bi].centroid, clusters[bi].size + clusters[bj].size};
    for (std::size_t f = 0; f < merged.centroid.size(); ++f) {
      merged.centroid[f] = (clusters[bi].centroid[f] * clusters[bi].size + clusters[bj].centroid[f] * clusters[bj].size) /
                           merged.size;
    }
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    clusters[bi] = merged;
    heights.push_back(best);
  }
  return heights;
}

}  // namespace wdsr::test
