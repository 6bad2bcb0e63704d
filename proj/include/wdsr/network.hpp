#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wdsr {

// All quantities are SI: m, m^3/s, W.

struct Junction {
  std::string id;
  double elevation = 0.0;
  double design_demand = 0.0;  ///< q*, m^3/s
  double required_head = 0.0;  ///< h*, m
};

struct Source {
  std::string id;
  double total_head = 0.0;  ///< H, m
  double outflow = 0.0;     ///< Q, m^3/s
};

struct Pump {
  std::string id;
  double power = 0.0;  ///< P, W
  /// Source whose delivery depends on this pump. A failed pump removes the
  /// source's outflow from the allocator; without a source the pump only
  /// contributes power to the Todini denominator.
  std::optional<std::string> source;
};

inline constexpr double kUnlimitedCapacity = std::numeric_limits<double>::infinity();

struct Pipe {
  std::string id;
  std::string from;
  std::string to;
  double length = 0.0;           ///< L, m
  double diameter = 0.0;         ///< D, m
  double friction_factor = 0.0;  ///< f, dimensionless
  double repair_rate = 0.0;      ///< RR, 1/m
  double capacity = kUnlimitedCapacity;  ///< m^3/s, surrogate allocator only

  /// f * L / D
  [[nodiscard]] double resistance() const { return friction_factor * length / diameter; }
};

enum class FlowUnits { CubicMetresPerSecond, LitresPerSecond };

FlowUnits parse_flow_units(std::string_view text);
std::string_view to_string(FlowUnits units);

/// Immutable water distribution network. Nodes are indexed junctions first
/// (0..junction_count-1) then sources. Pipes form an undirected multigraph;
/// parallel pipes are allowed, self-loops are not.
class Network {
 public:
  /// Validates every invariant and throws ValidationError on the first
  /// violation.
  static Network build(std::vector<Junction> junctions, std::vector<Source> sources,
                       std::vector<Pump> pumps, std::vector<Pipe> pipes);

  [[nodiscard]] const std::vector<Junction>& junctions() const { return junctions_; }
  [[nodiscard]] const std::vector<Source>& sources() const { return sources_; }
  [[nodiscard]] const std::vector<Pump>& pumps() const { return pumps_; }
  [[nodiscard]] const std::vector<Pipe>& pipes() const { return pipes_; }

  [[nodiscard]] std::size_t junction_count() const { return junctions_.size(); }
  [[nodiscard]] std::size_t source_count() const { return sources_.size(); }
  [[nodiscard]] std::size_t pump_count() const { return pumps_.size(); }
  [[nodiscard]] std::size_t pipe_count() const { return pipes_.size(); }
  [[nodiscard]] std::size_t node_count() const { return junctions_.size() + sources_.size(); }

  [[nodiscard]] std::optional<std::size_t> find_node(std::string_view id) const;
  /// Throws ValidationError for unknown ids.
  [[nodiscard]] std::size_t node_index(std::string_view id) const;
  [[nodiscard]] std::size_t pipe_index(std::string_view id) const;
  [[nodiscard]] std::size_t pump_index(std::string_view id) const;

  [[nodiscard]] const std::string& node_id(std::size_t node) const;
  [[nodiscard]] bool is_source(std::size_t node) const { return node >= junctions_.size(); }
  [[nodiscard]] std::size_t source_node(std::size_t source) const {
    return junctions_.size() + source;
  }

  /// Endpoint node indices of a pipe.
  [[nodiscard]] std::pair<std::size_t, std::size_t> endpoints(std::size_t pipe) const {
    return ends_[pipe];
  }
  /// The endpoint of `pipe` that is not `node`.
  [[nodiscard]] std::size_t other_end(std::size_t pipe, std::size_t node) const;

  /// Pipes incident to a node, ordered by ascending pipe id.
  [[nodiscard]] std::span<const std::size_t> incident_pipes(std::size_t node) const {
    return incident_[node];
  }
  /// Pipe indices ordered by ascending pipe id.
  [[nodiscard]] std::span<const std::size_t> pipes_by_id() const { return pipe_order_; }
  /// Position of the pipe in ascending-id order; compares like the ids.
  [[nodiscard]] std::size_t pipe_rank(std::size_t pipe) const { return pipe_rank_[pipe]; }

  /// Sum of design demand over junctions.
  [[nodiscard]] double total_design_demand() const;

  /// Stable content digest (hex).
  [[nodiscard]] std::string digest() const;

 private:
  Network() = default;

  std::vector<Junction> junctions_;
  std::vector<Source> sources_;
  std::vector<Pump> pumps_;
  std::vector<Pipe> pipes_;

  std::unordered_map<std::string, std::size_t> node_lookup_;
  std::unordered_map<std::string, std::size_t> pipe_lookup_;
  std::unordered_map<std::string, std::size_t> pump_lookup_;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<std::size_t> pipe_order_;
  std::vector<std::size_t> pipe_rank_;
};

/// Failed components as index masks sized to the network.
struct FailureSet {
  std::vector<bool> pipes;
  std::vector<bool> pumps;

  static FailureSet none(const Network& net);
  /// Throws ValidationError for unknown ids.
  static FailureSet from_ids(const Network& net, const std::set<std::string>& pipe_ids,
                             const std::set<std::string>& pump_ids = {});

  [[nodiscard]] std::size_t failed_pipe_count() const;
};

// ---- structural queries -------------------------------------------------

/// Number of incident pipes; parallel pipes count individually.
std::size_t node_degree(const Network& net, std::string_view node_id);

/// True iff a path of non-failed pipes links the node to any source.
bool is_connected_to_source(const Network& net, std::string_view node_id,
                            const std::set<std::string>& failed_pipes);

/// Per-node reachability from the active sources over non-failed pipes.
/// A source is inactive when a pump attached to it has failed.
std::vector<bool> reachable_from_sources(const Network& net, const FailureSet& failures);

/// Sources whose attached pumps are all intact.
std::vector<bool> active_sources(const Network& net, const std::vector<bool>& failed_pumps);

// ---- file I/O ------------------------------------------------------------

/// Reads the JSON network schema. Flow fields (design_demand, outflow,
/// capacity) are converted to m^3/s using the file's "units" key, or
/// `default_units` when the file has none.
Network load_network(const std::filesystem::path& path,
                     FlowUnits default_units = FlowUnits::CubicMetresPerSecond);
Network parse_network(std::string_view json_text, const std::string& origin,
                      FlowUnits default_units = FlowUnits::CubicMetresPerSecond);

/// Canonical JSON text (units m3s, 2-space indent, trailing newline).
std::string network_to_json(const Network& net);
void save_network(const Network& net, const std::filesystem::path& path);

}  // namespace wdsr
