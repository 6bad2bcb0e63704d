// wdsr: command-line front end for the resilience metrics, scenario engine
// and metric catalog.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "wdsr/buffering.hpp"
#include "wdsr/clustering.hpp"
#include "wdsr/csv.hpp"
#include "wdsr/digest.hpp"
#include "wdsr/errors.hpp"
#include "wdsr/hydraulic.hpp"
#include "wdsr/metric_value.hpp"
#include "wdsr/metrics_graph.hpp"
#include "wdsr/metrics_performance.hpp"
#include "wdsr/metrics_score.hpp"
#include "wdsr/network.hpp"
#include "wdsr/scenario.hpp"
#include "wdsr/taxonomy.hpp"

namespace fs = std::filesystem;
using namespace wdsr;

namespace {

const std::vector<std::string> kMetricNames = {
    "hashimoto", "zhuang",  "fragility", "fr",  "user_severity", "todini", "buffering",
    "herrera",   "herrera_weighted", "dma", "balaei", "wpr"};

struct Config {
  std::string metric;
  std::string network;
  std::string series;
  std::string states;
  std::string spec;
  std::string out;
  std::string text_out;
  std::string units = "m3s";
  std::string node;
  std::string pipe;
  std::string members;
  std::string indicators;
  std::string answers;
  std::string checklist;
  std::string catalog;
  std::string mode = "system";
  std::string oracle = "connectivity";
  std::string averaging = "requested";
  std::string mc_metric = "zhuang";
  std::string window;
  std::optional<std::uint64_t> seed;
  double threshold = 0.9;
  double trim = kDefaultTrimFraction;
  double step_seconds = 1.0;
  std::size_t K = kDefaultPathCount;
  std::size_t max_k = 2;
  std::size_t k = 5;
  std::size_t n = 100;
  std::size_t horizon = 1;
  std::size_t threads = 1;
  bool exhaustive = false;
};

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(fmt::format("cannot write '{}'", path));
  out << content;
  if (!out) throw ParseError(fmt::format("write to '{}' failed", path));
}

void require(const std::string& value, const char* flag, const std::string& what) {
  if (value.empty()) throw ValidationError(fmt::format("{} requires {}", what, flag));
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return Digest().update(ss.str()).hex();
}

Network load_net(const Config& cfg, const std::string& what) {
  require(cfg.network, "--network", what);
  return load_network(cfg.network, parse_flow_units(cfg.units));
}

HydraulicSeries load_windowed_series(const Config& cfg, const std::string& what) {
  require(cfg.series, "--series", what);
  auto series = load_series(cfg.series, cfg.step_seconds);
  if (!cfg.window.empty()) {
    const auto colon = cfg.window.find(':');
    if (colon == std::string::npos) throw ValidationError("--window expects BEGIN:END");
    const auto b = csv::to_integer(cfg.window.substr(0, colon), "--window begin");
    const auto e = csv::to_integer(cfg.window.substr(colon + 1), "--window end");
    if (b < 0 || e < 0) throw ValidationError("--window bounds must be non-negative");
    series.set_window(static_cast<std::size_t>(b), static_cast<std::size_t>(e));
  }
  return series;
}

ThresholdMode parse_mode(const std::string& mode) {
  if (mode == "system") return ThresholdMode::System;
  if (mode == "node") return ThresholdMode::PerNode;
  throw ValidationError(fmt::format("unknown threshold mode '{}' (valid: system, node)", mode));
}

PathAveraging parse_averaging(const std::string& text) {
  if (text == "requested") return PathAveraging::PerRequestedK;
  if (text == "available") return PathAveraging::PerAvailablePath;
  throw ValidationError(fmt::format("unknown averaging '{}' (valid: requested, available)", text));
}

/// CSV with a `state` column of S/F values.
BinaryStateSeries load_states(const std::string& path) {
  const auto table = csv::read_file(path);
  const int col = table.column("state");
  if (col < 0) throw ParseError(fmt::format("{}: missing column 'state'", path));
  BinaryStateSeries s;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& v = table.rows[r][static_cast<std::size_t>(col)];
    if (v == "S") {
      s.states.push_back(State::Satisfactory);
    } else if (v == "F") {
      s.states.push_back(State::Failure);
    } else {
      throw ParseError(fmt::format("{}:{}: state must be S or F", path, table.lines[r]));
    }
  }
  return s;
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void emit_metric(const MetricValue& m, const Config& cfg) {
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
  const std::string json = to_json(m).dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << json;
  } else {
    write_text(cfg.out, json);
    std::cout << fmt::format("{} = {}\n", m.name, m.value);
  }
}

MetricValue compute_metric(const Config& cfg) {
  const std::string& name = cfg.metric;
  const std::string what = "metric " + name;
  if (name == "hashimoto") {
    if (!cfg.states.empty()) {
      auto m = hashimoto_recovery(load_states(cfg.states));
      m.inputs_digest = file_digest(cfg.states);
      return m;
    }
    const auto series = load_windowed_series(cfg, what);
    auto m = hashimoto_recovery(classify_states(series, cfg.threshold, parse_mode(cfg.mode)));
    m.inputs_digest = series.digest();
    return m;
  }
  if (name == "zhuang") return zhuang_availability(load_windowed_series(cfg, what));
  if (name == "fragility") {
    const auto net = load_net(cfg, what);
    require(cfg.pipe, "--pipe", what);
    const auto& pipe = net.pipes()[net.pipe_index(cfg.pipe)];
    return make_metric("fragility", pipe_fragility(pipe), NominalRange{0.0, 1.0}, net.digest());
  }
  if (name == "fr") return flow_based_resilience(load_net(cfg, what), load_windowed_series(cfg, what));
  if (name == "user_severity") {
    require(cfg.node, "--node", what);
    return user_severity(load_windowed_series(cfg, what), cfg.node);
  }
  if (name == "todini") return todini_index(load_net(cfg, what), load_windowed_series(cfg, what));
  if (name == "buffering") {
    const auto net = load_net(cfg, what);
    FeasibilityOracle oracle;
    if (cfg.oracle == "connectivity") {
      oracle = connectivity_oracle(net);
    } else if (cfg.oracle == "service") {
      oracle = service_oracle(net, cfg.threshold, parse_mode(cfg.mode));
    } else {
      throw ValidationError(fmt::format("unknown oracle '{}' (valid: connectivity, service)", cfg.oracle));
    }
    const auto result = buffering_capacity(net, oracle, cfg.max_k);
    auto m = make_metric("buffering", static_cast<double>(result.k), std::nullopt, net.digest());
    if (result.witness) {
      std::string ids;
      for (const auto& c : *result.witness) ids += (ids.empty() ? "" : ",") + component_id(net, c);
      m.flags.push_back("witness:" + ids);
    }
    return m;
  }
  if (name == "herrera" || name == "herrera_weighted") {
    const auto net = load_net(cfg, what);
    require(cfg.node, "--node", what);
    const auto avg = parse_averaging(cfg.averaging);
    const auto idx = name == "herrera" ? herrera_node_index(net, cfg.node, cfg.K, avg)
                                       : demand_weighted_node_index(net, cfg.node, cfg.K, avg);
    if (idx.is_source) {
      throw UndefinedInputError(fmt::format("node '{}' is a source; its index is unbounded", cfg.node));
    }
    return make_metric(name, idx.value, std::nullopt, net.digest());
  }
  if (name == "dma") {
    const auto net = load_net(cfg, what);
    require(cfg.members, "--members", what);
    const auto members = split_ids(cfg.members);
    return make_metric("dma", dma_index(net, members, cfg.K, cfg.trim, parse_averaging(cfg.averaging)),
                       std::nullopt, net.digest());
  }
  if (name == "balaei") {
    require(cfg.indicators, "--indicators", what);
    const auto inds = load_indicators(cfg.indicators);
    return make_metric("balaei", balaei_aggregate(inds), NominalRange{0.0, 1.0}, file_digest(cfg.indicators));
  }
  if (name == "wpr") {
    require(cfg.answers, "--answers", what);
    const auto checklist = load_wpr_checklist(cfg.checklist.empty()
                                                  ? (fs::path(WDSR_DATA_DIR) / "wpr_checklist.json").string()
                                                  : cfg.checklist);
    const auto score = wpr_score(checklist, load_wpr_answers(cfg.answers));
    return make_metric("wpr", static_cast<double>(score),
                       NominalRange{0.0, static_cast<double>(checklist.total())}, file_digest(cfg.answers));
  }
  std::string valid;
  for (const auto& n : kMetricNames) valid += (valid.empty() ? "" : ", ") + n;
  throw ValidationError(fmt::format("unknown metric '{}' (valid: {})", name, valid));
}

void cmd_metric(const Config& cfg) {
  if (cfg.metric == "herrera" && cfg.node.empty()) {
    const auto net = load_net(cfg, "metric herrera");
    const auto rows = junction_indices(net, cfg.K, parse_averaging(cfg.averaging), cfg.threads);
    const auto text = node_indices_csv(rows);
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      write_text(cfg.out, text);
    }
    return;
  }
  emit_metric(compute_metric(cfg), cfg);
}

ScenarioSpec load_spec(const Config& cfg, const std::string& what) {
  require(cfg.spec, "--spec", what);
  auto spec = load_scenario(cfg.spec);
  if (cfg.seed) spec.seed = *cfg.seed;
  return spec;
}

void cmd_scenario_run(const Config& cfg) {
  const auto net = load_net(cfg, "scenario run");
  const auto spec = load_spec(cfg, "scenario run");
  const auto series = apply_scenario(net, spec, cfg.horizon);
  const auto text = series_to_csv(series);
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  write_text(cfg.out, text);
  double delivered = 0.0, demand = 0.0;
  for (std::size_t i = 0; i < series.delivered.size(); ++i) {
    delivered += series.delivered[i];
    demand += series.demand[i];
  }
  std::cout << fmt::format("steps {}  junctions {}  delivered {:.6g} of {:.6g} m3\n", series.steps,
                           series.node_count(), delivered * series.step_seconds, demand * series.step_seconds);
}

void cmd_scenario_mc(const Config& cfg) {
  const auto net = load_net(cfg, "scenario mc");
  const auto spec = load_spec(cfg, "scenario mc");
  MonteCarloOptions opt;
  opt.replicates = cfg.n;
  opt.horizon = cfg.horizon;
  opt.threads = cfg.threads;
  opt.exhaustive = cfg.exhaustive;
  opt.threshold = cfg.threshold;
  const auto result = monte_carlo(net, spec, parse_mc_metric(cfg.mc_metric), opt);
  const auto& s = result.summary;
  const std::string table =
      fmt::format("metric {}  replicates {}  seed {}\nmean {:.9g}  min {:.9g}  p05 {:.9g}  p50 {:.9g}  p95 {:.9g}  max {:.9g}\n",
                  result.metric, result.values.size(), result.seed, s.mean, s.min, s.p05, s.p50, s.p95, s.max);
  if (cfg.out.empty()) {
    std::cout << monte_carlo_to_json(result);
    return;
  }
  const bool as_csv = fs::path(cfg.out).extension() == ".csv";
  write_text(cfg.out, as_csv ? monte_carlo_to_csv(result) : monte_carlo_to_json(result));
  std::cout << table;
}

Catalog load_cat(const Config& cfg) {
  auto cat = load_catalog(cfg.catalog.empty() ? shipped_catalog_path() : fs::path(cfg.catalog));
  for (const auto& w : cat.warnings) std::cerr << "warning: " << w << "\n";
  return cat;
}

void cmd_catalog_counts(const Config& cfg) {
  const auto cat = load_cat(cfg);
  const auto counts = summary_counts(cat.records);
  std::cout << summary_table(counts);
  if (!cfg.out.empty()) write_text(cfg.out, to_json(counts).dump(2) + "\n");
}

void cmd_catalog_correlate(const Config& cfg) {
  const auto cat = load_cat(cfg);
  const auto cols = correlation_columns();
  const auto m = pearson_matrix(cat.records, cols);
  std::string table = fmt::format("{:>4}", "");
  for (Flag f : m.columns) table += fmt::format(" {:>6}", flag_code(f));
  table += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    table += fmt::format("{:>4}", flag_code(m.columns[i]));
    for (std::size_t j = 0; j < m.size(); ++j) {
      table += m.is_defined(i, j) ? fmt::format(" {:>6.3f}", m.at(i, j)) : fmt::format(" {:>6}", "nan");
    }
    table += "\n";
  }
  std::cout << table;
  if (!cfg.out.empty()) write_text(cfg.out, correlation_csv(m));
}

ClusteringResult cluster_catalog(const Catalog& cat, const Config& cfg) {
  const auto features = clustering_features();
  return ward_clustering(cat.records, features, cfg.k);
}

void cmd_catalog_cluster(const Config& cfg) {
  const auto cat = load_cat(cfg);
  const auto result = cluster_catalog(cat, cfg);
  std::string labels = "metric,cluster\n";
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    labels += fmt::format("{},{}\n", csv::escape(cat.records[i].metric), result.labels[i]);
  }
  if (!cfg.out.empty()) write_text(cfg.out, labels);

  std::vector<int> reference;
  for (const auto& r : cat.records) reference.push_back(r.cluster);
  const bool has_reference =
      std::none_of(reference.begin(), reference.end(), [](int c) { return c == 0; });
  std::vector<std::size_t> sizes(result.k, 0);
  for (int l : result.labels) ++sizes[static_cast<std::size_t>(l - 1)];
  for (std::size_t c = 0; c < sizes.size(); ++c) std::cout << fmt::format("cluster {}: {} metrics\n", c + 1, sizes[c]);
  if (!has_reference) return;
  const auto agree = partition_agreement(result.labels, reference);
  std::cout << fmt::format("agreement with CL column: {}/{}\n", agree.matched, agree.total);
  for (std::size_t i : agree.mismatches) {
    const auto it = std::find_if(agree.mapping.begin(), agree.mapping.end(),
                                 [&](const auto& p) { return p.first == result.labels[i]; });
    const std::string mapped = it == agree.mapping.end() ? "none" : fmt::format("CL{}", it->second);
    std::cout << fmt::format("  mismatch: {} (cluster {} ~ {}, table CL{})\n", cat.records[i].metric,
                             result.labels[i], mapped, reference[i]);
  }
}

void cmd_catalog_dendrogram(const Config& cfg) {
  const auto cat = load_cat(cfg);
  const auto result = cluster_catalog(cat, cfg);
  const auto text = dendrogram_text(result);
  if (!cfg.out.empty()) export_dendrogram(result, cfg.out);
  if (!cfg.text_out.empty()) {
    write_text(cfg.text_out, text);
  } else if (cfg.out.empty()) {
    std::cout << dendrogram_json(result);
  } else {
    std::cout << text;
  }
}

void cmd_list_metrics(const Config& cfg) {
  const auto cat = load_cat(cfg);
  std::size_t width = 0;
  for (const auto& r : cat.records) width = std::max(width, r.metric.size());
  for (const auto& r : cat.records) {
    std::string flags;
    for (Flag f : kAllFlags) {
      if (r.has(f)) flags += (flags.empty() ? "" : " ") + std::string(flag_code(f));
    }
    std::cout << fmt::format("{:<{}}  CL{}  {}\n", r.metric, width, r.cluster, flags);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Water distribution system resilience metrics"};
  app.require_subcommand(1);
  Config cfg;

  auto* metric = app.add_subcommand("metric", "Compute one resilience metric");
  metric->add_option("name", cfg.metric, "Metric name (see --help)")->required();
  metric->add_option("--network", cfg.network, "Network JSON");
  metric->add_option("--series,--state", cfg.series, "Hydraulic series CSV");
  metric->add_option("--states", cfg.states, "Hashimoto: CSV with a state column of S/F");
  metric->add_option("--window", cfg.window, "Analysis window BEGIN:END over series steps");
  metric->add_option("--step-seconds", cfg.step_seconds, "Duration of one series step");
  metric->add_option("--threshold", cfg.threshold, "Baseline functionality threshold")->capture_default_str();
  metric->add_option("--mode", cfg.mode, "Threshold mode: system|node")->capture_default_str();
  metric->add_option("--node", cfg.node, "Junction id");
  metric->add_option("--pipe", cfg.pipe, "Pipe id (fragility)");
  metric->add_option("--members", cfg.members, "DMA junction ids, comma separated");
  metric->add_option("--K", cfg.K, "Shortest paths per source")->capture_default_str();
  metric->add_option("--trim", cfg.trim, "Trim fraction per tail")->capture_default_str();
  metric->add_option("--averaging", cfg.averaging, "Path averaging: requested|available")->capture_default_str();
  metric->add_option("--max-k", cfg.max_k, "Largest failure set size searched")->capture_default_str();
  metric->add_option("--oracle", cfg.oracle, "Buffering feasibility: connectivity|service")->capture_default_str();
  metric->add_option("--indicators", cfg.indicators, "Balaei indicator CSV");
  metric->add_option("--answers", cfg.answers, "WPR answers JSON");
  metric->add_option("--checklist", cfg.checklist, "WPR checklist JSON (default: shipped)");
  metric->add_option("--threads", cfg.threads, "Worker threads for per-node indices")->capture_default_str();
  metric->add_option("--units", cfg.units, "Flow units of network files without a units key: m3s|lps")->capture_default_str();
  metric->add_option("--out", cfg.out, "Write the JSON report (or node CSV) here");

  auto* scenario = app.add_subcommand("scenario", "Run critical-event scenarios");
  scenario->require_subcommand(1);
  auto* run = scenario->add_subcommand("run", "Apply a scenario and write the series");
  auto* mc = scenario->add_subcommand("mc", "Monte Carlo over a scenario");
  for (auto* sub : {run, mc}) {
    sub->add_option("--network", cfg.network, "Network JSON");
    sub->add_option("--spec", cfg.spec, "Scenario JSON");
    sub->add_option("--seed", cfg.seed, "Override the spec seed");
    sub->add_option("--horizon", cfg.horizon, "Number of steps")->capture_default_str();
    sub->add_option("--units", cfg.units, "Flow units of network files without a units key: m3s|lps")->capture_default_str();
    sub->add_option("--out", cfg.out, "Output file");
  }
  mc->add_option("--n", cfg.n, "Replicates")->capture_default_str();
  mc->add_option("--metric", cfg.mc_metric, "zhuang|hashimoto|fr|todini|severity")->capture_default_str();
  mc->add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();
  mc->add_option("--threshold", cfg.threshold, "Hashimoto threshold")->capture_default_str();
  mc->add_flag("--exhaustive", cfg.exhaustive, "Enumerate random outcomes instead of sampling");

  auto* catalog = app.add_subcommand("catalog", "Metric catalog analysis");
  catalog->require_subcommand(1);
  auto* counts = catalog->add_subcommand("counts", "Counts per category");
  auto* correlate = catalog->add_subcommand("correlate", "Pearson correlation matrix");
  auto* cluster = catalog->add_subcommand("cluster", "Ward clustering");
  auto* dendrogram = catalog->add_subcommand("dendrogram", "Export the Ward dendrogram");
  for (auto* sub : {counts, correlate, cluster, dendrogram}) {
    sub->add_option("--catalog", cfg.catalog, "Catalog CSV (default: shipped)");
    sub->add_option("--out", cfg.out, "Output file");
  }
  for (auto* sub : {cluster, dendrogram}) sub->add_option("--k", cfg.k, "Cluster count")->capture_default_str();
  dendrogram->add_option("--text", cfg.text_out, "Also write a text rendering here");

  auto* list = app.add_subcommand("list-metrics", "List catalog metrics with their flags");
  list->add_option("--catalog", cfg.catalog, "Catalog CSV (default: shipped)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (metric->parsed()) cmd_metric(cfg);
    else if (run->parsed()) cmd_scenario_run(cfg);
    else if (mc->parsed()) cmd_scenario_mc(cfg);
    else if (counts->parsed()) cmd_catalog_counts(cfg);
    else if (correlate->parsed()) cmd_catalog_correlate(cfg);
    else if (cluster->parsed()) cmd_catalog_cluster(cfg);
    else if (dendrogram->parsed()) cmd_catalog_dendrogram(cfg);
    else if (list->parsed()) cmd_list_metrics(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ComputationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
