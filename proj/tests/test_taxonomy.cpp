#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "support.hpp"
#include "wdsr/clustering.hpp"
#include "wdsr/errors.hpp"
#include "wdsr/taxonomy.hpp"

using namespace wdsr;

namespace {

const Catalog& shipped() {
  static const Catalog catalog = load_catalog(shipped_catalog_path());
  return catalog;
}

Catalog parse(const std::string& text) {
  std::istringstream in(text);
  return parse_catalog(in, "inline");
}

const std::string kHeader = "metric,citation,M,R,L,A,TI,TD,GT,PB,SB,CM,BF,RD,RC,CL\n";

MetricRecord record_from_bits(const std::string& name, const std::vector<int>& bits) {
  MetricRecord r;
  r.metric = name;
  for (std::size_t f = 0; f < bits.size(); ++f) r.flags[f] = bits[f] != 0;
  return r;
}

std::vector<std::vector<double>> features_of(const std::vector<MetricRecord>& records) {
  std::vector<std::vector<double>> points;
  for (const auto& r : records) {
    std::vector<double> p;
    for (bool b : r.flags) p.push_back(b ? 1.0 : 0.0);
    points.push_back(p);
  }
  return points;
}

}  // namespace

TEST(Catalog, ShippedDatasetLoads) {
  const auto& catalog = shipped();
  ASSERT_EQ(catalog.records.size(), 59u);
  const auto it = std::find_if(catalog.records.begin(), catalog.records.end(),
                               [](const MetricRecord& r) { return r.citation == "EzioTodini.2000"; });
  ASSERT_NE(it, catalog.records.end());
  EXPECT_TRUE(it->has(Flag::Anticipate));
  EXPECT_TRUE(it->has(Flag::TimeIndependent));
  EXPECT_TRUE(it->has(Flag::PerformanceBased));
  EXPECT_TRUE(it->has(Flag::BaselineFunctionality));
  EXPECT_TRUE(it->has(Flag::Redundancy));
  EXPECT_FALSE(it->has(Flag::React));
  EXPECT_FALSE(it->has(Flag::Recovery));
  EXPECT_EQ(it->cluster, 3);
}

TEST(Catalog, UnquantifiedRowWarnsButIsKept) {
  const auto& catalog = shipped();
  ASSERT_EQ(catalog.warnings.size(), 1u);
  EXPECT_NE(catalog.warnings[0].find("mean time to repair"), std::string::npos) << catalog.warnings[0];
}

TEST(Catalog, SummaryCounts) {
  const auto c = summary_counts(shipped().records);
  EXPECT_EQ(c.total, 59u);
  EXPECT_EQ(c.count(Flag::TimeIndependent), 34u);
  EXPECT_EQ(c.count(Flag::TimeDependent), 25u);
  EXPECT_EQ(c.count(Flag::GraphTheoretic), 9u);
  EXPECT_EQ(c.count(Flag::ScoreBased), 4u);
  EXPECT_NEAR(static_cast<double>(c.count(Flag::PerformanceBased)), 46.0, 1.0);
  EXPECT_EQ(c.count(Flag::Composite), 15u);
  EXPECT_EQ(c.count(Flag::BaselineFunctionality), 20u);
  EXPECT_EQ(c.count(Flag::Redundancy), 18u);
  EXPECT_EQ(c.count(Flag::Recovery), 21u);
  EXPECT_EQ(c.count(Flag::Anticipate), 34u);
  EXPECT_EQ(c.count(Flag::React), 26u);
  EXPECT_EQ(c.count(Flag::Monitor), 1u);
  EXPECT_EQ(c.count(Flag::Learn), 1u);
  EXPECT_NEAR(c.percent(Flag::TimeIndependent), 100.0 * 34 / 59, 1e-12);
}

TEST(Catalog, HistogramsSumToTotal) {
  const auto c = summary_counts(shipped().records);
  std::size_t functions = 0, properties = 0, weighted = 0;
  for (std::size_t k = 0; k < c.function_histogram.size(); ++k) {
    functions += c.function_histogram[k];
    weighted += k * c.function_histogram[k];
  }
  for (auto n : c.property_histogram) properties += n;
  EXPECT_EQ(functions, 59u);
  EXPECT_EQ(properties, 59u);
  EXPECT_EQ(weighted, c.count(Flag::Monitor) + c.count(Flag::React) + c.count(Flag::Learn) + c.count(Flag::Anticipate));
}

TEST(Catalog, SingleZeroRecord) {
  const auto catalog = parse(kHeader + "x,y,0,0,0,0,0,0,0,0,0,0,0,0,0,\n");
  const auto c = summary_counts(catalog.records);
  EXPECT_EQ(c.total, 1u);
  for (Flag f : kAllFlags) EXPECT_EQ(c.count(f), 0u);
  EXPECT_EQ(catalog.records[0].cluster, 0);
}

TEST(Catalog, MalformedInput) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse(kHeader), ParseError);
  EXPECT_THROW(parse("metric,citation,M\nx,y,1\n"), ParseError);
  EXPECT_THROW(parse(kHeader + "x,y,0,1,0,0,0,1,0,1,0,0,1,0,1\n"), ParseError);
  EXPECT_THROW(parse(kHeader + "x,y,0,2,0,0,0,1,0,1,0,0,1,0,1,1\n"), ParseError);
  EXPECT_THROW(parse(kHeader + "x,y,0,1,0,0,0,1,0,1,0,0,1,0,1,6\n"), ParseError);
  EXPECT_THROW(load_catalog("/nonexistent/catalog.csv"), ParseError);
}

TEST(Catalog, QuotedFields) {
  const auto catalog = parse(kHeader + "\"a, b\",c,0,1,0,0,0,1,0,1,0,0,1,0,1,2\n");
  ASSERT_EQ(catalog.records.size(), 1u);
  EXPECT_EQ(catalog.records[0].metric, "a, b");
  EXPECT_EQ(catalog.records[0].cluster, 2);
}

TEST(Flags, CodesRoundTrip) {
  for (Flag f : kAllFlags) {
    EXPECT_EQ(parse_flag(flag_code(f)), f);
    EXPECT_EQ(parse_flag(flag_label(f)), f);
  }
  EXPECT_FALSE(parse_flag("XX").has_value());
}

TEST(Pearson, Examples) {
  const std::vector<double> a{1, 0, 1, 0}, b{0, 1, 0, 1}, zero{0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(*pearson(a, b), -1.0);
  EXPECT_DOUBLE_EQ(*pearson(a, a), 1.0);
  EXPECT_FALSE(pearson(a, zero).has_value());
}

TEST(Pearson, ZeroVarianceColumnIsUndefined) {
  const auto catalog = parse(kHeader + "x,y,0,1,0,0,0,1,0,1,0,0,1,0,1,1\nz,w,0,0,0,1,1,0,0,1,0,0,1,0,0,2\n");
  const auto m = pearson_matrix(catalog.records, correlation_columns());
  const std::size_t monitor = 0, react = 1;
  EXPECT_FALSE(m.is_defined(monitor, react));
  EXPECT_TRUE(std::isnan(m.at(monitor, react)));
  EXPECT_TRUE(m.is_defined(react, react));
  EXPECT_NE(correlation_csv(m).find("nan"), std::string::npos);
}

TEST(Pearson, ShippedMatrixMatchesGolden) {
  const auto m = pearson_matrix(shipped().records, correlation_columns());
  std::istringstream golden(test::read_file(test::golden("catalog_correlation.csv")));
  std::string line;
  std::getline(golden, line);
  std::size_t i = 0;
  while (std::getline(golden, line)) {
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    EXPECT_EQ(parse_flag(cell), m.columns[i]);
    for (std::size_t j = 0; j < m.size(); ++j) {
      std::getline(row, cell, ',');
      EXPECT_NEAR(m.at(i, j), std::stod(cell), 1e-12) << i << "," << j;
    }
    ++i;
  }
  EXPECT_EQ(i, 13u);
}

TEST(Pearson, ShippedCorrelationSigns) {
  const auto m = pearson_matrix(shipped().records, correlation_columns());
  EXPECT_GT(m.between(Flag::React, Flag::TimeDependent), 0.6);
  EXPECT_GT(m.between(Flag::Anticipate, Flag::TimeIndependent), 0.6);
  EXPECT_GT(m.between(Flag::Recovery, Flag::TimeDependent), 0.6);
  EXPECT_GT(m.between(Flag::Redundancy, Flag::GraphTheoretic), 0.3);
}

TEST(Pearson, MatrixPropertiesOnRandomCatalogs) {
  std::mt19937_64 rng(101);
  for (int c = 0; c < 1000; ++c) {
    std::vector<MetricRecord> records(test::pick(rng, 2, 20));
    for (auto& r : records) {
      for (auto&& f : r.flags) f = test::coin(rng, 0.4);
    }
    const auto m = pearson_matrix(records, correlation_columns());
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.is_defined(i, i)) { ASSERT_NEAR(m.at(i, i), 1.0, 1e-12); }
      for (std::size_t j = 0; j < m.size(); ++j) {
        ASSERT_EQ(m.is_defined(i, j), m.is_defined(j, i));
        if (!m.is_defined(i, j)) continue;
        ASSERT_GE(m.at(i, j), -1.0);
        ASSERT_LE(m.at(i, j), 1.0);
        ASSERT_NEAR(m.at(i, j), m.at(j, i), 1e-12);
      }
    }
  }
}

TEST(Ward, HandComputedFourPoints) {
  const auto linkage = ward_linkage({{0.0}, {1.0}, {3.0}, {7.0}});
  ASSERT_EQ(linkage.merges.size(), 3u);
  EXPECT_NEAR(linkage.merges[0].height, 1.0, 1e-12);
  EXPECT_NEAR(linkage.merges[1].height, std::sqrt(4.0 / 3.0) * 2.5, 1e-12);
  EXPECT_NEAR(linkage.merges[2].height, std::sqrt(1.5) * 17.0 / 3.0, 1e-12);
  EXPECT_EQ(linkage.merges[0].left, 0u);
  EXPECT_EQ(linkage.merges[0].right, 1u);
  EXPECT_EQ(linkage.merges[1].size, 3u);
  EXPECT_EQ(cut_linkage(linkage, 2), (std::vector<int>{1, 1, 1, 2}));
  EXPECT_EQ(cut_linkage(linkage, 4), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(cut_linkage(linkage, 1), (std::vector<int>{1, 1, 1, 1}));
}

TEST(Ward, MatchesCentroidOracle) {
  std::mt19937_64 rng(103);
  for (int c = 0; c < 1000; ++c) {
    std::vector<std::vector<double>> points(test::pick(rng, 2, 12), std::vector<double>(test::pick(rng, 1, 4)));
    for (auto& p : points) {
      for (auto& x : p) x = test::uniform(rng, -5.0, 5.0);
    }
    const auto linkage = ward_linkage(points);
    const auto expected = test::centroid_ward_heights(points);
    ASSERT_EQ(linkage.merges.size(), expected.size());
    for (std::size_t m = 0; m < expected.size(); ++m) {
      ASSERT_NEAR(linkage.merges[m].height, expected[m], 1e-9 * std::max(1.0, expected[m])) << "case " << c;
      if (m > 0) { ASSERT_GE(linkage.merges[m].height, linkage.merges[m - 1].height - 1e-12); }
    }
  }
}

TEST(Ward, ShippedHeightsMatchGolden) {
  const auto result = ward_clustering(shipped().records, clustering_features(), 5);
  std::istringstream golden(test::read_file(test::golden("catalog_ward_heights.txt")));
  std::vector<double> heights;
  for (double h; golden >> h;) heights.push_back(h);
  ASSERT_EQ(heights.size(), 58u);
  ASSERT_EQ(result.linkage.merges.size(), 58u);
  for (std::size_t m = 0; m < heights.size(); ++m) EXPECT_NEAR(result.linkage.merges[m].height, heights[m], 1e-9) << m;
}

TEST(Ward, ShippedPartitionAgreement) {
  const auto& records = shipped().records;
  const auto result = ward_clustering(records, clustering_features(), 5);
  std::vector<int> table;
  for (const auto& r : records) table.push_back(r.cluster);
  const auto agreement = partition_agreement(result.labels, table);
  EXPECT_EQ(agreement.total, 59u);
  EXPECT_EQ(agreement.matched + agreement.mismatches.size(), 59u);
  std::set<int> used(result.labels.begin(), result.labels.end());
  EXPECT_EQ(used.size(), 5u);
  EXPECT_EQ(agreement.mapping.size(), 5u);
}

TEST(Ward, IdenticalRowsShareACluster) {
  std::mt19937_64 rng(107);
  for (int c = 0; c < 1000; ++c) {
    std::vector<MetricRecord> records;
    const std::size_t distinct = test::pick(rng, 1, 8);
    for (std::size_t i = 0; i < distinct; ++i) {
      std::vector<int> bits(kFlagCount);
      for (auto& b : bits) b = test::coin(rng, 0.4) ? 1 : 0;
      const std::size_t copies = test::pick(rng, 1, 3);
      for (std::size_t k = 0; k < copies; ++k) records.push_back(record_from_bits("r", bits));
    }
    std::shuffle(records.begin(), records.end(), rng);
    const std::size_t k = test::pick(rng, 1, records.size());
    const auto result = ward_clustering(records, clustering_features(), k);
    std::set<int> used(result.labels.begin(), result.labels.end());
    ASSERT_EQ(used.size(), k);
    const auto points = features_of(records);
    for (std::size_t i = 0; i < records.size(); ++i) {
      for (std::size_t j = i + 1; j < records.size(); ++j) {
        // Only meaningful while k does not exceed the number of distinct rows.
        if (points[i] == points[j] && k <= distinct) { ASSERT_EQ(result.labels[i], result.labels[j]) << "case " << c; }
      }
    }
  }
}

TEST(Ward, TwoSeparatedBlocksRecovered) {
  std::mt19937_64 rng(109);
  for (int c = 0; c < 200; ++c) {
    std::vector<MetricRecord> records;
    std::vector<int> truth;
    for (std::size_t i = 0; i < test::pick(rng, 4, 20); ++i) {
      const bool second = test::coin(rng, 0.5);
      std::vector<int> bits(kFlagCount, 0);
      for (std::size_t f = 0; f < kFlagCount; ++f) {
        const bool in_block = second ? f >= 7 : f < 6;
        bits[f] = in_block ? 1 : 0;
      }
      bits[test::pick(rng, 0, kFlagCount - 1)] ^= test::coin(rng, 0.3) ? 1 : 0;
      records.push_back(record_from_bits("r", bits));
      truth.push_back(second ? 2 : 1);
    }
    if (std::set<int>(truth.begin(), truth.end()).size() < 2) continue;
    const auto result = ward_clustering(records, clustering_features(), 2);
    const auto agreement = partition_agreement(result.labels, truth);
    ASSERT_EQ(agreement.matched, records.size()) << "case " << c;
  }
}

TEST(Ward, Errors) {
  const auto& records = shipped().records;
  EXPECT_THROW(ward_clustering(records, clustering_features(), 0), ValidationError);
  EXPECT_THROW(ward_clustering(records, clustering_features(), 60), ValidationError);
  EXPECT_THROW(ward_linkage({}), ValidationError);
  EXPECT_THROW(ward_linkage({{0.0}, {1.0, 2.0}}), ValidationError);
}

TEST(PartitionAgreement, BestBijection) {
  const std::vector<int> a{1, 1, 2, 2, 3}, b{7, 7, 5, 5, 5};
  const auto r = partition_agreement(a, b);
  EXPECT_EQ(r.matched, 4u);
  EXPECT_EQ(r.mismatches, std::vector<std::size_t>{4});
  EXPECT_DOUBLE_EQ(partition_agreement(a, a).fraction(), 1.0);
  EXPECT_THROW(partition_agreement(a, std::vector<int>{1}), ValidationError);
}

TEST(PartitionAgreement, RelabelInvariant) {
  std::mt19937_64 rng(113);
  for (int c = 0; c < 1000; ++c) {
    std::vector<int> a(test::pick(rng, 1, 30)), b(a.size());
    for (auto& x : a) x = static_cast<int>(test::pick(rng, 1, 5));
    for (auto& x : b) x = static_cast<int>(test::pick(rng, 1, 5));
    std::vector<int> perm{1, 2, 3, 4, 5};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> relabelled;
    for (int x : a) relabelled.push_back(perm[x - 1] + 10);
    ASSERT_EQ(partition_agreement(relabelled, b).matched, partition_agreement(a, b).matched);
    ASSERT_EQ(partition_agreement(relabelled, a).matched, a.size());
  }
}

TEST(Dendrogram, TwoRecordsSingleMerge) {
  std::vector<MetricRecord> records{record_from_bits("a", {1, 0}), record_from_bits("b", {0, 1})};
  const auto result = ward_clustering(records, clustering_features(), 1);
  ASSERT_EQ(result.linkage.merges.size(), 1u);
  EXPECT_NEAR(result.linkage.merges[0].height, std::sqrt(2.0), 1e-12);
}

TEST(Dendrogram, ExportRoundTrip) {
  const auto result = ward_clustering(shipped().records, clustering_features(), 5);
  const auto dir = std::filesystem::temp_directory_path() / "wdsr_dendrogram_test";
  std::filesystem::create_directories(dir);
  export_dendrogram(result, dir / "tree.json");
  const auto again = load_dendrogram(dir / "tree.json");
  EXPECT_EQ(again.labels, result.labels);
  EXPECT_EQ(again.leaf_names, result.leaf_names);
  ASSERT_EQ(again.linkage.merges.size(), 58u);
  for (std::size_t m = 0; m < 58; ++m) EXPECT_EQ(again.linkage.merges[m].height, result.linkage.merges[m].height);
  EXPECT_EQ(dendrogram_json(again), dendrogram_json(result));
  std::filesystem::remove_all(dir);
}

TEST(Dendrogram, TamperedLabelsRejected) {
  const auto result = ward_clustering(shipped().records, clustering_features(), 5);
  auto tampered = result;
  tampered.labels[0] = tampered.labels[0] % 5 + 1;
  EXPECT_THROW(parse_dendrogram(dendrogram_json(tampered), "tampered"), ParseError);
}

TEST(Dendrogram, TextRenderListsEveryLeaf) {
  const auto result = ward_clustering(shipped().records, clustering_features(), 5);
  const auto text = dendrogram_text(result);
  std::size_t leaves = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.find("- ") != std::string::npos && line.find("[cluster ") != std::string::npos) ++leaves;
  }
  EXPECT_EQ(leaves, 59u);
}
