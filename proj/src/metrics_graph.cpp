#include "wdsr/metrics_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <thread>

#include <fmt/core.h>

#include "wdsr/csv.hpp"
#include "wdsr/errors.hpp"

namespace wdsr {

namespace {

// Dijkstra label: resistance, then the pipe-rank sequence. Ranks compare
// like pipe ids, so the order is (resistance, lexicographic pipe ids).
struct Label {
  double cost = 0.0;
  std::vector<std::size_t> ranks;

  friend bool operator<(const Label& a, const Label& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.ranks < b.ranks;
  }
  friend bool operator==(const Label& a, const Label& b) = default;
};

// Walks a pipe sequence from `start`; returns the node list or throws when
// the sequence is not a connected simple path.
std::vector<std::size_t> walk(const Network& net, std::span<const std::size_t> pipes,
                              std::size_t start) {
  std::vector<std::size_t> nodes{start};
  std::set<std::size_t> seen{start};
  for (std::size_t p : pipes) {
    const auto [a, b] = net.endpoints(p);
    const std::size_t here = nodes.back();
    if (here != a && here != b) {
      throw ValidationError(fmt::format("pipe '{}' does not continue the path", net.pipes()[p].id));
    }
    const std::size_t next = net.other_end(p, here);
    if (!seen.insert(next).second) {
      throw ValidationError(fmt::format("path revisits node '{}'", net.node_id(next)));
    }
    nodes.push_back(next);
  }
  return nodes;
}

std::size_t path_start(const Network& net, std::span<const std::size_t> pipes) {
  const auto [a, b] = net.endpoints(pipes[0]);
  if (pipes.size() == 1) return a;
  const auto [c, d] = net.endpoints(pipes[1]);
  const bool a_shared = a == c || a == d;
  const bool b_shared = b == c || b == d;
  if (a_shared && b_shared) {
    throw ValidationError("path revisits a node through parallel pipes");
  }
  if (!a_shared && !b_shared) {
    throw ValidationError(
        fmt::format("pipe '{}' does not continue the path", net.pipes()[pipes[1]].id));
  }
  return a_shared ? b : a;
}

// Lexicographically smallest minimum-resistance path from `start` to `target`
// avoiding banned nodes and pipes, extending `prefix`.
std::optional<Label> shortest_extension(const Network& net, std::size_t start, std::size_t target,
                                        const std::vector<bool>& banned_nodes,
                                        const std::vector<bool>& banned_pipes, Label prefix,
                                        std::vector<std::size_t>* pipe_out) {
  using Entry = std::pair<Label, std::size_t>;
  auto greater = [](const Entry& x, const Entry& y) { return y.first < x.first; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(greater)> heap(greater);
  std::vector<std::optional<Label>> best(net.node_count());
  std::vector<std::size_t> via(net.node_count(), 0);
  std::vector<bool> done(net.node_count(), false);

  best[start] = prefix;
  heap.emplace(std::move(prefix), start);
  while (!heap.empty()) {
    auto [label, node] = heap.top();
    heap.pop();
    if (done[node] || !(label == *best[node])) continue;
    done[node] = true;
    if (node == target) {
      if (pipe_out) {
        pipe_out->clear();
        for (std::size_t v = target; v != start; v = net.other_end(via[v], v)) {
          pipe_out->push_back(via[v]);
        }
        std::reverse(pipe_out->begin(), pipe_out->end());
      }
      return label;
    }
    for (std::size_t p : net.incident_pipes(node)) {
      if (banned_pipes[p]) continue;
      const std::size_t next = net.other_end(p, node);
      if (banned_nodes[next] || done[next]) continue;
      Label extended{label.cost + net.pipes()[p].resistance(), label.ranks};
      extended.ranks.push_back(net.pipe_rank(p));
      if (!best[next] || extended < *best[next]) {
        best[next] = extended;
        via[next] = p;
        heap.emplace(std::move(extended), next);
      }
    }
  }
  return std::nullopt;
}

struct Candidate {
  Label label;
  std::vector<std::size_t> pipes;
  friend bool operator<(const Candidate& a, const Candidate& b) { return a.label < b.label; }
};

}  // namespace

double path_resistance(const Network& net, std::span<const std::size_t> pipes) {
  if (pipes.empty()) return 0.0;
  for (std::size_t p : pipes) {
    if (p >= net.pipe_count()) throw ValidationError("unknown pipe index");
  }
  walk(net, pipes, path_start(net, pipes));
  double r = 0.0;
  for (std::size_t p : pipes) r += net.pipes()[p].resistance();
  return r;
}

double path_resistance(const Network& net, std::span<const std::string> pipe_ids) {
  std::vector<std::size_t> pipes;
  pipes.reserve(pipe_ids.size());
  for (const auto& id : pipe_ids) pipes.push_back(net.pipe_index(id));
  return path_resistance(net, std::span<const std::size_t>(pipes));
}

std::vector<WeightedPath> k_shortest_paths(const Network& net, std::size_t from, std::size_t to,
                                           std::size_t K) {
  if (K < 1) throw ValidationError("K must be >= 1");
  if (from >= net.node_count() || to >= net.node_count()) throw ValidationError("unknown node");
  if (from == to) return {WeightedPath{{}, {from}, 0.0}};

  const std::vector<bool> no_nodes(net.node_count(), false);
  const std::vector<bool> no_pipes(net.pipe_count(), false);

  std::vector<Candidate> accepted;
  {
    std::vector<std::size_t> pipes;
    auto first = shortest_extension(net, from, to, no_nodes, no_pipes, Label{}, &pipes);
    if (!first) return {};
    accepted.push_back({std::move(*first), std::move(pipes)});
  }

  std::set<Candidate> pool;
  while (accepted.size() < K) {
    const Candidate& prev = accepted.back();
    const auto prev_nodes = walk(net, prev.pipes, from);
    for (std::size_t i = 0; i < prev.pipes.size(); ++i) {
      const std::size_t spur = prev_nodes[i];
      std::vector<bool> banned_pipes = no_pipes;
      for (const auto& a : accepted) {
        if (a.pipes.size() > i && std::equal(a.pipes.begin(), a.pipes.begin() + i, prev.pipes.begin())) {
          banned_pipes[a.pipes[i]] = true;
        }
      }
      std::vector<bool> banned_nodes = no_nodes;
      for (std::size_t j = 0; j < i; ++j) banned_nodes[prev_nodes[j]] = true;

      Label root;
      for (std::size_t j = 0; j < i; ++j) {
        root.cost += net.pipes()[prev.pipes[j]].resistance();
        root.ranks.push_back(net.pipe_rank(prev.pipes[j]));
      }
      std::vector<std::size_t> spur_pipes;
      auto found = shortest_extension(net, spur, to, banned_nodes, banned_pipes, std::move(root),
                                      &spur_pipes);
      if (!found) continue;
      Candidate c{std::move(*found),
                  std::vector<std::size_t>(prev.pipes.begin(), prev.pipes.begin() + i)};
      c.pipes.insert(c.pipes.end(), spur_pipes.begin(), spur_pipes.end());
      pool.insert(std::move(c));
    }
    // Drop pool entries already accepted (identical labels mean identical paths).
    while (!pool.empty() &&
           std::any_of(accepted.begin(), accepted.end(),
                       [&](const Candidate& a) { return a.label == pool.begin()->label; })) {
      pool.erase(pool.begin());
    }
    if (pool.empty()) break;
    accepted.push_back(*pool.begin());
    pool.erase(pool.begin());
  }

  std::vector<WeightedPath> out;
  out.reserve(accepted.size());
  for (auto& c : accepted) {
    auto nodes = walk(net, c.pipes, from);
    out.push_back({std::move(c.pipes), std::move(nodes), c.label.cost});
  }
  return out;
}

std::vector<WeightedPath> k_shortest_paths(const Network& net, std::string_view from,
                                           std::string_view to, std::size_t K) {
  return k_shortest_paths(net, net.node_index(from), net.node_index(to), K);
}

NodeIndex herrera_node_index(const Network& net, std::string_view node_id, std::size_t K,
                             PathAveraging averaging) {
  if (K < 1) throw ValidationError("K must be >= 1");
  const std::size_t node = net.node_index(node_id);
  if (net.is_source(node)) return NodeIndex{true, 0.0};
  double total = 0.0;
  for (std::size_t s = 0; s < net.source_count(); ++s) {
    const auto paths = k_shortest_paths(net, node, net.source_node(s), K);
    if (paths.empty()) continue;
    double inverse_sum = 0.0;
    for (const auto& p : paths) inverse_sum += 1.0 / p.resistance;
    const double divisor =
        averaging == PathAveraging::PerRequestedK ? static_cast<double>(K) : static_cast<double>(paths.size());
    total += inverse_sum / divisor;
  }
  return NodeIndex{false, total};
}

NodeIndex demand_weighted_node_index(const Network& net, std::string_view node_id, std::size_t K,
                                     PathAveraging averaging) {
  const double total_demand = net.total_design_demand();
  if (!(total_demand > 0.0)) {
    throw UndefinedInputError("demand weighting undefined: total network demand is zero");
  }
  const auto index = herrera_node_index(net, node_id, K, averaging);
  if (index.is_source) return index;
  const double q = net.junctions()[net.node_index(node_id)].design_demand;
  return NodeIndex{false, index.value * q / total_demand};
}

double trimmed_mean_index(std::span<const double> values, double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
    throw ValidationError(fmt::format("trim fraction {} outside [0, 0.5)", trim_fraction));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto drop = static_cast<std::size_t>(
      std::floor(trim_fraction * static_cast<double>(sorted.size()) + 1e-9));
  if (sorted.size() <= 2 * drop) throw ValidationError("no values left after trimming");
  double sum = 0.0;
  for (std::size_t i = drop; i < sorted.size() - drop; ++i) sum += sorted[i];
  return sum / static_cast<double>(sorted.size() - 2 * drop);
}

std::vector<NodeIndexRow> junction_indices(const Network& net, std::size_t K,
                                           PathAveraging averaging, std::size_t threads) {
  if (K < 1) throw ValidationError("K must be >= 1");
  const double total_demand = net.total_design_demand();
  std::vector<NodeIndexRow> rows(net.junction_count());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < rows.size(); i += step) {
      const auto& j = net.junctions()[i];
      const double value = herrera_node_index(net, j.id, K, averaging).value;
      rows[i] = {j.id, value, total_demand > 0.0 ? value * j.design_demand / total_demand : 0.0};
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, rows.size()));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  return rows;
}

std::string node_indices_csv(const std::vector<NodeIndexRow>& rows) {
  std::string out = "node_id,I,weighted_I\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{}\n", csv::escape(r.node_id), r.index, r.weighted);
  }
  return out;
}

double dma_index(const Network& net, std::span<const std::string> members, std::size_t K,
                 double trim_fraction, PathAveraging averaging) {
  std::vector<double> values;
  for (const auto& id : members) {
    const auto index = herrera_node_index(net, id, K, averaging);
    if (!index.is_source) values.push_back(index.value);
  }
  return trimmed_mean_index(values, trim_fraction);
}

}  // namespace wdsr
