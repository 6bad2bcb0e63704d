#include "wdsr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "wdsr/errors.hpp"

namespace wdsr {

namespace {

using nlohmann::json;

const char* type_name(ScenarioEvent::Type type) {
  switch (type) {
    case ScenarioEvent::Type::PipeFailure: return "pipe_failure";
    case ScenarioEvent::Type::PumpFailure: return "pump_failure";
    case ScenarioEvent::Type::DemandScale: return "demand_scale";
    case ScenarioEvent::Type::SupplyScale: return "supply_scale";
  }
  return "";
}

ScenarioEvent::Type parse_type(const std::string& name, const std::string& where) {
  for (auto t : {ScenarioEvent::Type::PipeFailure, ScenarioEvent::Type::PumpFailure,
                 ScenarioEvent::Type::DemandScale, ScenarioEvent::Type::SupplyScale}) {
    if (name == type_name(t)) return t;
  }
  throw ParseError(fmt::format("{}: unknown event type '{}'", where, name));
}

const char* ids_key(ScenarioEvent::Type type) {
  switch (type) {
    case ScenarioEvent::Type::PipeFailure: return "pipes";
    case ScenarioEvent::Type::PumpFailure: return "pumps";
    case ScenarioEvent::Type::DemandScale: return "nodes";
    case ScenarioEvent::Type::SupplyScale: return "sources";
  }
  return "";
}

std::uint64_t unsigned_field(const json& v, const std::string& where, const char* key) {
  if (!v.is_number_unsigned()) {
    throw ParseError(fmt::format("{}: '{}' must be a non-negative integer", where, key));
  }
  return v.get<std::uint64_t>();
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at every step.
    if (r > std::numeric_limits<std::uint64_t>::max() / (n - k + i)) {
      throw ValidationError("too many combinations for exhaustive mode");
    }
    r = r * (n - k + i) / i;
  }
  return r;
}

// Lexicographic unranking of a k-subset of {0..n-1}.
std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k, std::uint64_t rank) {
  std::vector<std::size_t> out;
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (;; ++next) {
      const std::uint64_t with_next = binomial(n - next - 1, k - slot - 1);
      if (rank < with_next) break;
      rank -= with_next;
    }
    out.push_back(next++);
  }
  return out;
}

std::vector<std::string> pipe_ids_sorted(const Network& net) {
  std::vector<std::string> ids;
  for (std::size_t p : net.pipes_by_id()) ids.push_back(net.pipes()[p].id);
  return ids;
}

}  // namespace

bool ScenarioSpec::has_random_events() const {
  return std::any_of(events.begin(), events.end(), [](const auto& e) { return e.is_random(); });
}

void ScenarioSpec::validate(const Network& net) const {
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    const std::string where = fmt::format("event #{} ({})", k, type_name(e.type));
    if (e.repair && !(e.onset < *e.repair)) {
      throw ValidationError(fmt::format("{}: onset must precede repair", where));
    }
    switch (e.type) {
      case ScenarioEvent::Type::PipeFailure:
        if (e.random_count > 0 && !e.ids.empty()) {
          throw ValidationError(where + ": give either pipe ids or random_count, not both");
        }
        if (e.random_count == 0 && e.ids.empty()) {
          throw ValidationError(where + ": no pipes to fail");
        }
        if (e.random_count > net.pipe_count()) {
          throw ValidationError(where + ": random_count exceeds the number of pipes");
        }
        for (const auto& id : e.ids) (void)net.pipe_index(id);
        break;
      case ScenarioEvent::Type::PumpFailure:
        if (e.ids.empty()) throw ValidationError(where + ": no pumps to fail");
        for (const auto& id : e.ids) (void)net.pump_index(id);
        break;
      case ScenarioEvent::Type::DemandScale:
      case ScenarioEvent::Type::SupplyScale: {
        if (!(std::isfinite(e.factor) && e.factor > 0.0)) {
          throw ValidationError(where + ": factor must be > 0");
        }
        const bool want_source = e.type == ScenarioEvent::Type::SupplyScale;
        for (const auto& id : e.ids) {
          if (net.is_source(net.node_index(id)) != want_source) {
            throw ValidationError(fmt::format("{}: '{}' is not a {}", where, id,
                                              want_source ? "source" : "junction"));
          }
        }
        break;
      }
    }
  }
}

ScenarioSpec parse_scenario(std::string_view json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }
  ScenarioSpec spec;
  try {
    if (!doc.is_object()) throw ParseError(origin + ": expected an object");
    for (const auto& [key, value] : doc.items()) {
      if (key != "seed" && key != "events") throw ParseError(fmt::format("{}: unknown field '{}'", origin, key));
    }
    if (doc.contains("seed")) spec.seed = unsigned_field(doc.at("seed"), origin, "seed");
    if (doc.contains("events")) {
      for (const auto& item : doc.at("events")) {
        const std::string where = fmt::format("{}: event #{}", origin, spec.events.size());
        ScenarioEvent e;
        e.type = parse_type(item.at("type").get<std::string>(), where);
        const char* key = ids_key(e.type);
        for (const auto& [k, v] : item.items()) {
          if (k != "type" && k != key && k != "random_count" && k != "factor" && k != "onset" &&
              k != "repair") {
            throw ParseError(fmt::format("{}: unknown field '{}'", where, k));
          }
        }
        if (item.contains(key)) e.ids = item.at(key).get<std::vector<std::string>>();
        if (item.contains("random_count")) {
          if (e.type != ScenarioEvent::Type::PipeFailure) {
            throw ParseError(where + ": random_count applies to pipe_failure only");
          }
          e.random_count = unsigned_field(item.at("random_count"), where, "random_count");
        }
        if (item.contains("factor")) e.factor = item.at("factor").get<double>();
        if (item.contains("onset")) e.onset = unsigned_field(item.at("onset"), where, "onset");
        if (item.contains("repair") && !item.at("repair").is_null()) {
          e.repair = unsigned_field(item.at("repair"), where, "repair");
        }
        spec.events.push_back(std::move(e));
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

std::string scenario_to_json(const ScenarioSpec& spec) {
  nlohmann::ordered_json doc;
  doc["seed"] = spec.seed;
  doc["events"] = nlohmann::ordered_json::array();
  for (const auto& e : spec.events) {
    nlohmann::ordered_json item;
    item["type"] = type_name(e.type);
    if (e.is_random()) {
      item["random_count"] = e.random_count;
    } else {
      item[ids_key(e.type)] = e.ids;
    }
    if (e.type == ScenarioEvent::Type::DemandScale || e.type == ScenarioEvent::Type::SupplyScale) {
      item["factor"] = e.factor;
    }
    item["onset"] = e.onset;
    if (e.repair) item["repair"] = *e.repair;
    doc["events"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ValidationError("empty range");
  const std::uint64_t max = std::mt19937_64::max();
  const std::uint64_t limit = max - (max % n + 1) % n;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x <= limit) return x % n;
  }
}

std::uint64_t exhaustive_outcomes(const Network& net, const ScenarioSpec& spec) {
  std::uint64_t total = 1;
  for (const auto& e : spec.events) {
    if (!e.is_random()) continue;
    const std::uint64_t c = binomial(net.pipe_count(), e.random_count);
    if (total > std::numeric_limits<std::uint64_t>::max() / c) {
      throw ValidationError("too many combinations for exhaustive mode");
    }
    total *= c;
  }
  return total;
}

ScenarioSpec resolve_random(const Network& net, const ScenarioSpec& spec, Rng& rng) {
  ScenarioSpec out = spec;
  const auto ids = pipe_ids_sorted(net);
  for (auto& e : out.events) {
    if (!e.is_random()) continue;
    // Partial Fisher-Yates over the id-sorted pipes.
    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < e.random_count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(order.size() - i));
      std::swap(order[i], order[j]);
    }
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(e.random_count));
    e.ids.clear();
    for (std::size_t i = 0; i < e.random_count; ++i) e.ids.push_back(ids[order[i]]);
    e.random_count = 0;
  }
  return out;
}

ScenarioSpec resolve_exhaustive(const Network& net, const ScenarioSpec& spec,
                                std::uint64_t outcome) {
  ScenarioSpec out = spec;
  const auto ids = pipe_ids_sorted(net);
  outcome %= exhaustive_outcomes(net, spec);
  for (auto& e : out.events) {
    if (!e.is_random()) continue;
    const std::uint64_t c = binomial(ids.size(), e.random_count);
    const auto picked = unrank_combination(ids.size(), e.random_count, outcome % c);
    outcome /= c;
    e.ids.clear();
    for (std::size_t i : picked) e.ids.push_back(ids[i]);
    e.random_count = 0;
  }
  return out;
}

HydraulicSeries apply_scenario(const Network& net, const ScenarioSpec& spec, std::size_t horizon) {
  if (horizon == 0) throw ValidationError("horizon must be >= 1");
  spec.validate(net);
  ScenarioSpec concrete = spec;
  if (spec.has_random_events()) {
    Rng rng(spec.seed);
    concrete = resolve_random(net, spec, rng);
  }

  std::vector<std::string> ids;
  for (const auto& j : net.junctions()) ids.push_back(j.id);
  auto series = HydraulicSeries::zeros(std::move(ids), horizon);

  const std::size_t nj = net.junction_count();
  for (std::size_t t = 0; t < horizon; ++t) {
    AllocationRequest request;
    request.demand_scale.assign(nj, 1.0);
    request.supply_scale.assign(net.source_count(), 1.0);
    request.failures = FailureSet::none(net);
    for (const auto& e : concrete.events) {
      if (!e.active(t)) continue;
      switch (e.type) {
        case ScenarioEvent::Type::PipeFailure:
          for (const auto& id : e.ids) request.failures.pipes[net.pipe_index(id)] = true;
          break;
        case ScenarioEvent::Type::PumpFailure:
          for (const auto& id : e.ids) request.failures.pumps[net.pump_index(id)] = true;
          break;
        case ScenarioEvent::Type::DemandScale:
          if (e.ids.empty()) {
            for (auto& f : request.demand_scale) f *= e.factor;
          } else {
            for (const auto& id : e.ids) request.demand_scale[net.node_index(id)] *= e.factor;
          }
          break;
        case ScenarioEvent::Type::SupplyScale:
          if (e.ids.empty()) {
            for (auto& f : request.supply_scale) f *= e.factor;
          } else {
            for (const auto& id : e.ids) {
              request.supply_scale[net.node_index(id) - nj] *= e.factor;
            }
          }
          break;
      }
    }
    const auto step = allocation_series(net, allocate(net, request));
    for (std::size_t i = 0; i < nj; ++i) {
      const std::size_t k = series.at(t, i);
      series.delivered[k] = step.delivered[i];
      series.demand[k] = step.demand[i];
      series.head[k] = step.head[i];
      series.required_head[k] = step.required_head[i];
    }
  }
  return series;
}

}  // namespace wdsr
