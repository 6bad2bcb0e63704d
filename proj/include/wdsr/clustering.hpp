#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wdsr/taxonomy.hpp"

namespace wdsr {

/// Merge of clusters `left` < `right`. Ids below the leaf count are leaves;
/// merge i creates cluster leaves + i.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Linkage {
  std::size_t leaves = 0;
  std::vector<Merge> merges;
};

/// Agglomerative Ward linkage on Euclidean distances (Lance-Williams
/// update). Pairs within a relative 1e-12 of the minimum are ties and the
/// pair whose smallest member records come first wins.
Linkage ward_linkage(const std::vector<std::vector<double>>& points);

/// Flat partition into k clusters by undoing the last k-1 merges. Labels
/// are 1..k in order of each cluster's first record.
std::vector<int> cut_linkage(const Linkage& linkage, std::size_t k);

struct ClusteringResult {
  std::vector<Flag> features;
  std::vector<std::string> leaf_names;
  Linkage linkage;
  std::size_t k = 0;
  std::vector<int> labels;
};

ClusteringResult ward_clustering(std::span<const MetricRecord> records, std::span<const Flag> features,
                                 std::size_t k);

/// Agreement of two labelings up to a relabeling: the best one-to-one
/// match of labels in `a` to labels in `b`.
struct PartitionAgreement {
  std::size_t matched = 0;
  std::size_t total = 0;
  /// (label in a, label in b) pairs of the best matching.
  std::vector<std::pair<int, int>> mapping;
  /// Indices whose label in `a` does not map to their label in `b`.
  std::vector<std::size_t> mismatches;

  [[nodiscard]] double fraction() const {
    return total == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(total);
  }
};

PartitionAgreement partition_agreement(std::span<const int> a, std::span<const int> b);

/// JSON tree with leaf names, merge heights and the flat labels.
std::string dendrogram_json(const ClusteringResult& result);
/// Indented text rendering, one line per node.
std::string dendrogram_text(const ClusteringResult& result);
void export_dendrogram(const ClusteringResult& result, const std::filesystem::path& json_path);
/// Re-imports an exported dendrogram; the stored labels must match the cut.
ClusteringResult parse_dendrogram(std::string_view json_text, const std::string& origin);
ClusteringResult load_dendrogram(const std::filesystem::path& path);

}  // namespace wdsr
