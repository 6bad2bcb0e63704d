#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wdsr/network.hpp"

namespace wdsr {

/// A simple path as pipe indices, with its visited nodes (one more than
/// pipes) and resistance sum f*L/D accumulated in path order.
struct WeightedPath {
  std::vector<std::size_t> pipes;
  std::vector<std::size_t> nodes;
  double resistance = 0.0;
};

/// Resistance sum of f*L/D along a pipe sequence. The sequence must form a
/// connected simple path; an empty sequence has resistance 0.
double path_resistance(const Network& net, std::span<const std::string> pipe_ids);
double path_resistance(const Network& net, std::span<const std::size_t> pipes);

/// The K simple paths of smallest resistance between two nodes, ascending;
/// equal resistances are ordered by their pipe-id sequence. Returns fewer
/// than K when fewer exist and an empty list for disconnected pairs.
std::vector<WeightedPath> k_shortest_paths(const Network& net, std::size_t from, std::size_t to,
                                           std::size_t K);
std::vector<WeightedPath> k_shortest_paths(const Network& net, std::string_view from,
                                           std::string_view to, std::size_t K);

inline constexpr std::size_t kDefaultPathCount = 5;
inline constexpr double kDefaultTrimFraction = 0.1;

enum class PathAveraging {
  PerRequestedK,   ///< divide by K even when fewer paths exist
  PerAvailablePath ///< divide by the number of paths found
};

/// Node resilience index. Sources have no finite value and are reported via
/// `is_source` instead.
struct NodeIndex {
  bool is_source = false;
  double value = 0.0;
};

/// I(i) = sum over sources s of (1/K) sum_k 1 / r(k, s). Unreachable sources
/// contribute 0.
NodeIndex herrera_node_index(const Network& net, std::string_view node_id,
                             std::size_t K = kDefaultPathCount,
                             PathAveraging averaging = PathAveraging::PerRequestedK);

/// I(i) * q_i / Q with Q the total design demand. Throws UndefinedInputError
/// when Q is zero.
NodeIndex demand_weighted_node_index(const Network& net, std::string_view node_id,
                                     std::size_t K = kDefaultPathCount,
                                     PathAveraging averaging = PathAveraging::PerRequestedK);

/// Drops floor(trim * n) values from each tail and averages the rest.
double trimmed_mean_index(std::span<const double> values, double trim_fraction = kDefaultTrimFraction);

struct NodeIndexRow {
  std::string node_id;
  double index = 0.0;
  double weighted = 0.0;
};

/// Index and demand-weighted index for every junction. Nodes are processed
/// on up to `threads` workers; output order is junction order regardless.
std::vector<NodeIndexRow> junction_indices(const Network& net, std::size_t K = kDefaultPathCount,
                                           PathAveraging averaging = PathAveraging::PerRequestedK,
                                           std::size_t threads = 1);

/// `node_id,I,weighted_I` rows.
std::string node_indices_csv(const std::vector<NodeIndexRow>& rows);

/// Trimmed mean of the indices of the given member junctions.
double dma_index(const Network& net, std::span<const std::string> members,
                 std::size_t K = kDefaultPathCount, double trim_fraction = kDefaultTrimFraction,
                 PathAveraging averaging = PathAveraging::PerRequestedK);

}  // namespace wdsr
