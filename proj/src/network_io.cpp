#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "wdsr/errors.hpp"
#include "wdsr/network.hpp"

namespace wdsr {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ParseError(fmt::format("{}: expected an object", where));
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ParseError(fmt::format("{}: unknown field '{}'", where, key));
  }
}

double number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(fmt::format("{}: missing field '{}'", where, key));
  if (!it->is_number()) throw ParseError(fmt::format("{}: field '{}' must be a number", where, key));
  return it->get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::string text(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(fmt::format("{}: missing field '{}'", where, key));
  if (!it->is_string()) throw ParseError(fmt::format("{}: field '{}' must be a string", where, key));
  return it->get<std::string>();
}

const json& array_or_empty(const json& doc, const char* key, const std::string& origin) {
  static const json empty = json::array();
  auto it = doc.find(key);
  if (it == doc.end()) return empty;
  if (!it->is_array()) throw ParseError(fmt::format("{}: '{}' must be an array", origin, key));
  return *it;
}

}  // namespace

Network parse_network(std::string_view json_text, const std::string& origin,
                      FlowUnits default_units) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }
  check_keys(doc, {"units", "junctions", "sources", "pumps", "pipes"}, origin);

  FlowUnits units = default_units;
  if (doc.contains("units")) {
    if (!doc["units"].is_string()) throw ParseError(fmt::format("{}: 'units' must be a string", origin));
    units = parse_flow_units(doc["units"].get<std::string>());
  }
  const double flow_scale = units == FlowUnits::LitresPerSecond ? 1e-3 : 1.0;

  std::vector<Junction> junctions;
  for (const auto& item : array_or_empty(doc, "junctions", origin)) {
    const std::string where = fmt::format("{}: junction #{}", origin, junctions.size());
    check_keys(item, {"id", "elevation", "design_demand", "required_head"}, where);
    junctions.push_back(Junction{text(item, "id", where), number_or(item, "elevation", 0.0, where),
                                 number(item, "design_demand", where) * flow_scale,
                                 number(item, "required_head", where)});
  }

  std::vector<Source> sources;
  for (const auto& item : array_or_empty(doc, "sources", origin)) {
    const std::string where = fmt::format("{}: source #{}", origin, sources.size());
    check_keys(item, {"id", "total_head", "outflow"}, where);
    sources.push_back(Source{text(item, "id", where), number(item, "total_head", where),
                             number(item, "outflow", where) * flow_scale});
  }

  std::vector<Pump> pumps;
  for (const auto& item : array_or_empty(doc, "pumps", origin)) {
    const std::string where = fmt::format("{}: pump #{}", origin, pumps.size());
    check_keys(item, {"id", "power", "source"}, where);
    Pump pump{text(item, "id", where), number(item, "power", where), std::nullopt};
    if (item.contains("source")) pump.source = text(item, "source", where);
    pumps.push_back(std::move(pump));
  }

  std::vector<Pipe> pipes;
  for (const auto& item : array_or_empty(doc, "pipes", origin)) {
    const std::string where = fmt::format("{}: pipe #{}", origin, pipes.size());
    check_keys(item, {"id", "from", "to", "length", "diameter", "friction_factor", "repair_rate",
                      "capacity"},
               where);
    Pipe pipe;
    pipe.id = text(item, "id", where);
    pipe.from = text(item, "from", where);
    pipe.to = text(item, "to", where);
    pipe.length = number(item, "length", where);
    pipe.diameter = number(item, "diameter", where);
    pipe.friction_factor = number(item, "friction_factor", where);
    pipe.repair_rate = number_or(item, "repair_rate", 0.0, where);
    if (item.contains("capacity")) pipe.capacity = number(item, "capacity", where) * flow_scale;
    pipes.push_back(std::move(pipe));
  }

  return Network::build(std::move(junctions), std::move(sources), std::move(pumps),
                        std::move(pipes));
}

Network load_network(const std::filesystem::path& path, FlowUnits default_units) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str(), path.string(), default_units);
}

std::string network_to_json(const Network& net) {
  ordered_json doc;
  doc["units"] = "m3s";
  doc["junctions"] = ordered_json::array();
  for (const auto& j : net.junctions()) {
    doc["junctions"].push_back({{"id", j.id},
                                {"elevation", j.elevation},
                                {"design_demand", j.design_demand},
                                {"required_head", j.required_head}});
  }
  doc["sources"] = ordered_json::array();
  for (const auto& s : net.sources()) {
    doc["sources"].push_back({{"id", s.id}, {"total_head", s.total_head}, {"outflow", s.outflow}});
  }
  doc["pumps"] = ordered_json::array();
  for (const auto& p : net.pumps()) {
    ordered_json item = {{"id", p.id}, {"power", p.power}};
    if (p.source) item["source"] = *p.source;
    doc["pumps"].push_back(std::move(item));
  }
  doc["pipes"] = ordered_json::array();
  for (const auto& p : net.pipes()) {
    ordered_json item = {{"id", p.id},
                         {"from", p.from},
                         {"to", p.to},
                         {"length", p.length},
                         {"diameter", p.diameter},
                         {"friction_factor", p.friction_factor},
                         {"repair_rate", p.repair_rate}};
    if (std::isfinite(p.capacity)) item["capacity"] = p.capacity;
    doc["pipes"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << network_to_json(net);
  if (!out) throw Error(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace wdsr
