#include "wdsr/metrics_score.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "wdsr/csv.hpp"
#include "wdsr/errors.hpp"

namespace wdsr {

using nlohmann::json;

double balaei_aggregate(std::span<const Indicator> indicators) {
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (const auto& ind : indicators) {
    if (!(ind.max_observed > 0.0)) {
      throw ValidationError(fmt::format("indicator '{}': max_observed must be > 0", ind.name));
    }
    if (!(std::isfinite(ind.weight) && ind.weight >= 0.0)) {
      throw ValidationError(fmt::format("indicator '{}': weight must be >= 0", ind.name));
    }
    const double i = ind.scaled();
    if (!(i >= 0.0 && i <= 1.0)) {
      throw ValidationError(
          fmt::format("indicator '{}': scaled value {} outside [0, 1]", ind.name, i));
    }
    weight_sum += ind.weight;
    weighted += ind.weight * i * i;
  }
  if (!(weight_sum > 0.0)) throw UndefinedInputError("indicator weights sum to zero");
  return weighted / weight_sum;
}

std::vector<Indicator> load_indicators(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const char* names[] = {"name", "raw", "max_observed", "weight"};
  int col[4];
  for (int c = 0; c < 4; ++c) {
    col[c] = table.column(names[c]);
    if (col[c] < 0) throw ParseError(fmt::format("{}: missing column '{}'", path.string(), names[c]));
  }
  std::vector<Indicator> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = fmt::format("{}:{}", path.string(), table.lines[r]);
    out.push_back({row[col[0]], csv::to_double(row[col[1]], where + ": raw"),
                   csv::to_double(row[col[2]], where + ": max_observed"),
                   csv::to_double(row[col[3]], where + ": weight")});
  }
  if (out.empty()) throw ParseError(fmt::format("{}: no indicators", path.string()));
  return out;
}

std::size_t WprChecklist::total() const {
  std::size_t n = 0;
  for (const auto& c : categories) n += c.criteria.size();
  return n;
}

void WprChecklist::validate() const {
  std::set<std::string> names;
  for (const auto& cat : categories) {
    for (const auto& crit : cat.criteria) {
      if (crit.name.empty()) throw ValidationError("criterion with empty name");
      if (!names.insert(crit.name).second) {
        throw ValidationError(fmt::format("duplicate criterion '{}'", crit.name));
      }
      if (crit.tags.empty()) {
        throw ValidationError(fmt::format("criterion '{}' has no taxonomy tags", crit.name));
      }
    }
  }
}

WprChecklist default_wpr_checklist() {
  // Placeholder criteria; the tags spread the monitor/react/anticipate
  // functions and the three properties across categories.
  struct Spec {
    const char* name;
    const char* slug;
    std::vector<std::vector<std::string>> tags;
  };
  const Spec specs[] = {
      {"supply", "supply",
       {{"anticipate", "redundancy"}, {"anticipate", "baseline_functionality"}, {"monitor"},
        {"anticipate", "redundancy"}, {"react", "recovery"}, {"anticipate"}}},
      {"finances", "finances",
       {{"anticipate"}, {"react", "recovery"}, {"anticipate"}, {"anticipate", "redundancy"},
        {"react"}, {"anticipate"}}},
      {"infrastructure", "infrastructure",
       {{"anticipate", "redundancy"}, {"monitor"}, {"react", "recovery"},
        {"anticipate", "baseline_functionality"}, {"anticipate"}, {"react"}}},
      {"service provision", "service_provision",
       {{"anticipate", "baseline_functionality"}, {"react", "recovery"}, {"monitor"},
        {"anticipate"}, {"react", "baseline_functionality"}, {"anticipate"}}},
      {"water quality", "water_quality",
       {{"monitor"}, {"react"}, {"anticipate", "baseline_functionality"}, {"monitor"},
        {"react", "recovery"}, {"anticipate"}}},
      {"governance", "governance",
       {{"anticipate"}, {"monitor"}, {"react"}, {"anticipate"}, {"anticipate", "redundancy"},
        {"react", "recovery"}}},
  };
  WprChecklist list;
  for (const auto& s : specs) {
    WprCategory cat{s.name, {}};
    for (std::size_t i = 0; i < s.tags.size(); ++i) {
      cat.criteria.push_back({fmt::format("{}_{:02}", s.slug, i + 1), s.tags[i]});
    }
    list.categories.push_back(std::move(cat));
  }
  return list;
}

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace

WprChecklist load_wpr_checklist(const std::filesystem::path& path) {
  const json doc = read_json(path);
  WprChecklist list;
  try {
    for (const auto& cat : doc.at("categories")) {
      WprCategory c{cat.at("name").get<std::string>(), {}};
      for (const auto& crit : cat.at("criteria")) {
        c.criteria.push_back(
            {crit.at("name").get<std::string>(), crit.at("tags").get<std::vector<std::string>>()});
      }
      list.categories.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  list.validate();
  return list;
}

std::string wpr_checklist_to_json(const WprChecklist& checklist) {
  nlohmann::ordered_json doc;
  doc["categories"] = nlohmann::ordered_json::array();
  for (const auto& cat : checklist.categories) {
    nlohmann::ordered_json c;
    c["name"] = cat.name;
    c["criteria"] = nlohmann::ordered_json::array();
    for (const auto& crit : cat.criteria) {
      c["criteria"].push_back({{"name", crit.name}, {"tags", crit.tags}});
    }
    doc["categories"].push_back(std::move(c));
  }
  return doc.dump(2) + "\n";
}

WprAnswers load_wpr_answers(const std::filesystem::path& path) {
  const json doc = read_json(path);
  if (!doc.is_object()) throw ParseError(fmt::format("{}: expected an object", path.string()));
  WprAnswers answers;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_boolean()) {
      throw ParseError(fmt::format("{}: answer for '{}' must be true or false", path.string(), key));
    }
    answers[key] = value.get<bool>();
  }
  return answers;
}

std::size_t wpr_score(const WprChecklist& checklist, const WprAnswers& answers) {
  checklist.validate();
  std::size_t points = 0;
  std::size_t answered = 0;
  for (const auto& cat : checklist.categories) {
    for (const auto& crit : cat.criteria) {
      auto it = answers.find(crit.name);
      if (it == answers.end()) {
        throw ValidationError(fmt::format("criterion '{}' not answered", crit.name));
      }
      ++answered;
      if (it->second) ++points;
    }
  }
  if (answered != answers.size()) {
    for (const auto& [name, value] : answers) {
      bool known = false;
      for (const auto& cat : checklist.categories) {
        for (const auto& crit : cat.criteria) known = known || crit.name == name;
      }
      if (!known) throw ValidationError(fmt::format("unknown criterion '{}'", name));
    }
  }
  return points;
}

}  // namespace wdsr
