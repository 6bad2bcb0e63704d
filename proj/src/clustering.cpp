#include "wdsr/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "wdsr/errors.hpp"

namespace wdsr {

namespace {

constexpr double kTieTolerance = 1e-12;

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

void validate_linkage(const Linkage& linkage) {
  const std::size_t n = linkage.leaves;
  if (n == 0) throw ValidationError("linkage has no leaves");
  if (linkage.merges.size() != n - 1) {
    throw ValidationError(fmt::format("linkage over {} leaves needs {} merges, has {}", n, n - 1,
                                      linkage.merges.size()));
  }
  std::vector<bool> used(2 * n - 1, false);
  std::vector<std::size_t> size(2 * n - 1, 1);
  for (std::size_t i = 0; i < linkage.merges.size(); ++i) {
    const auto& m = linkage.merges[i];
    const std::size_t id = n + i;
    if (m.left >= m.right || m.right >= id) throw ValidationError(fmt::format("merge {} has invalid children", i));
    if (used[m.left] || used[m.right]) throw ValidationError(fmt::format("merge {} reuses a cluster", i));
    if (!std::isfinite(m.height) || m.height < 0.0) throw ValidationError(fmt::format("merge {} has invalid height", i));
    used[m.left] = used[m.right] = true;
    size[id] = size[m.left] + size[m.right];
    if (m.size != size[id]) throw ValidationError(fmt::format("merge {} has size {}, expected {}", i, m.size, size[id]));
  }
}

std::vector<std::size_t> leaves_under(const Linkage& linkage, std::size_t id) {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{id};
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    if (c < linkage.leaves) {
      out.push_back(c);
    } else {
      const auto& m = linkage.merges[c - linkage.leaves];
      stack.push_back(m.right);
      stack.push_back(m.left);
    }
  }
  return out;
}

}  // namespace

Linkage ward_linkage(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  if (n == 0) throw ValidationError("clustering needs at least one record");
  for (const auto& p : points) {
    if (p.size() != points.front().size()) throw ValidationError("feature vectors differ in length");
  }

  // Squared distances between slots; a merged cluster takes over the slot
  // of its first member.
  std::vector<double> d2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d2[i * n + j] = d2[j * n + i] = squared_distance(points[i], points[j]);
  }
  std::vector<std::size_t> slot_id(n), slot_size(n, 1), slot_first(n);
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) slot_id[i] = slot_first[i] = active[i] = i;

  Linkage linkage;
  linkage.leaves = n;
  while (active.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) best = std::min(best, d2[active[x] * n + active[y]]);
    }
    const double limit = best + kTieTolerance * best;
    std::size_t bx = 0, by = 0;
    std::pair<std::size_t, std::size_t> best_key{n, n};
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        if (d2[active[x] * n + active[y]] > limit) continue;
        const auto fa = slot_first[active[x]], fb = slot_first[active[y]];
        const std::pair key{std::min(fa, fb), std::max(fa, fb)};
        if (key < best_key) {
          best_key = key;
          bx = x;
          by = y;
        }
      }
    }

    const std::size_t a = active[bx], b = active[by];
    const double dab = d2[a * n + b];
    const double na = static_cast<double>(slot_size[a]), nb = static_cast<double>(slot_size[b]);
    for (std::size_t c : active) {
      if (c == a || c == b) continue;
      const double nc = static_cast<double>(slot_size[c]);
      const double v = ((na + nc) * d2[a * n + c] + (nb + nc) * d2[b * n + c] - nc * dab) / (na + nb + nc);
      d2[a * n + c] = d2[c * n + a] = std::max(v, 0.0);
    }

    Merge m;
    m.left = std::min(slot_id[a], slot_id[b]);
    m.right = std::max(slot_id[a], slot_id[b]);
    m.height = std::sqrt(dab);
    m.size = slot_size[a] + slot_size[b];
    linkage.merges.push_back(m);

    slot_id[a] = n + linkage.merges.size() - 1;
    slot_size[a] = m.size;
    slot_first[a] = std::min(slot_first[a], slot_first[b]);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(by));
  }
  return linkage;
}

std::vector<int> cut_linkage(const Linkage& linkage, std::size_t k) {
  validate_linkage(linkage);
  const std::size_t n = linkage.leaves;
  if (k < 1 || k > n) throw ValidationError(fmt::format("cluster count must be in 1..{}, got {}", n, k));

  std::vector<std::size_t> roots{2 * n - 2};
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const std::size_t id = 2 * n - 2 - i;
    const auto it = std::find(roots.begin(), roots.end(), id);
    roots.erase(it);
    const auto& m = linkage.merges[id - n];
    roots.push_back(m.left);
    roots.push_back(m.right);
  }

  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> groups;
  for (std::size_t r : roots) {
    auto members = leaves_under(linkage, r);
    const std::size_t first = *std::min_element(members.begin(), members.end());
    groups.emplace_back(first, std::move(members));
  }
  std::sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<int> labels(n, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t leaf : groups[g].second) labels[leaf] = static_cast<int>(g + 1);
  }
  return labels;
}

ClusteringResult ward_clustering(std::span<const MetricRecord> records, std::span<const Flag> features,
                                 std::size_t k) {
  if (records.empty()) throw ValidationError("clustering needs at least one record");
  if (features.empty()) throw ValidationError("clustering needs at least one feature");
  if (k < 1 || k > records.size()) {
    throw ValidationError(fmt::format("cluster count must be in 1..{}, got {}", records.size(), k));
  }
  std::vector<std::vector<double>> points;
  points.reserve(records.size());
  ClusteringResult result;
  for (const auto& rec : records) {
    std::vector<double> p;
    for (Flag f : features) p.push_back(rec.has(f) ? 1.0 : 0.0);
    points.push_back(std::move(p));
    result.leaf_names.push_back(rec.metric);
  }
  result.features.assign(features.begin(), features.end());
  result.linkage = ward_linkage(points);
  result.k = k;
  result.labels = cut_linkage(result.linkage, k);
  return result;
}

PartitionAgreement partition_agreement(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ValidationError("labelings differ in length");

  auto distinct = [](std::span<const int> v) {
    std::vector<int> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  std::vector<int> la = distinct(a), lb = distinct(b);
  const bool swapped = lb.size() > la.size();
  std::span<const int> rows = swapped ? b : a, cols = swapped ? a : b;
  if (swapped) std::swap(la, lb);
  const std::size_t p = la.size(), q = lb.size();
  if (q > 20) throw ValidationError("too many labels for exact matching");

  auto index_of = [](const std::vector<int>& labels, int v) {
    return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), v) - labels.begin());
  };
  std::vector<std::size_t> table(p * q, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) ++table[index_of(la, rows[i]) * q + index_of(lb, cols[i])];

  // dp over rows with the set of used columns as bitmask.
  const std::size_t masks = std::size_t{1} << q;
  constexpr long kUnset = -1;
  std::vector<long> dp((p + 1) * masks, kUnset);
  dp[0] = 0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t mask = 0; mask < masks; ++mask) {
      const long cur = dp[i * masks + mask];
      if (cur == kUnset) continue;
      auto& skip = dp[(i + 1) * masks + mask];
      skip = std::max(skip, cur);
      for (std::size_t j = 0; j < q; ++j) {
        if (mask & (std::size_t{1} << j)) continue;
        auto& next = dp[(i + 1) * masks + (mask | (std::size_t{1} << j))];
        next = std::max(next, cur + static_cast<long>(table[i * q + j]));
      }
    }
  }
  std::size_t best_mask = 0;
  for (std::size_t mask = 0; mask < masks; ++mask) {
    if (dp[p * masks + mask] > dp[p * masks + best_mask]) best_mask = mask;
  }

  PartitionAgreement out;
  out.total = a.size();
  out.matched = static_cast<std::size_t>(dp[p * masks + best_mask]);
  std::vector<int> partner(p, std::numeric_limits<int>::min());
  std::size_t mask = best_mask;
  for (std::size_t i = p; i-- > 0;) {
    const long target = dp[(i + 1) * masks + mask];
    if (dp[i * masks + mask] == target) continue;
    for (std::size_t j = 0; j < q; ++j) {
      const std::size_t bit = std::size_t{1} << j;
      if (!(mask & bit)) continue;
      const long prev = dp[i * masks + (mask ^ bit)];
      if (prev != kUnset && prev + static_cast<long>(table[i * q + j]) == target) {
        partner[i] = lb[j];
        mask ^= bit;
        break;
      }
    }
  }
  // Complete the bijection with the remaining labels; these pairs share no
  // records, so the matched count is unchanged.
  std::size_t free = 0;
  for (std::size_t i = 0; i < p; ++i) {
    if (partner[i] != std::numeric_limits<int>::min()) continue;
    while (free < q && std::find(partner.begin(), partner.end(), lb[free]) != partner.end()) ++free;
    if (free < q) partner[i] = lb[free++];
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (partner[i] == std::numeric_limits<int>::min()) continue;
    out.mapping.emplace_back(swapped ? partner[i] : la[i], swapped ? la[i] : partner[i]);
  }
  std::sort(out.mapping.begin(), out.mapping.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto it = std::find_if(out.mapping.begin(), out.mapping.end(),
                                 [&](const auto& pr) { return pr.first == a[i]; });
    if (it == out.mapping.end() || it->second != b[i]) out.mismatches.push_back(i);
  }
  return out;
}

std::string dendrogram_json(const ClusteringResult& result) {
  const auto& lk = result.linkage;
  nlohmann::ordered_json doc;
  std::vector<std::string> features;
  for (Flag f : result.features) features.emplace_back(flag_code(f));
  doc["features"] = features;
  doc["k"] = result.k;
  doc["leaves"] = result.leaf_names;
  doc["labels"] = result.labels;
  nlohmann::ordered_json merges = nlohmann::ordered_json::array();
  for (const auto& m : lk.merges) {
    merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  }
  doc["merges"] = merges;

  std::vector<nlohmann::ordered_json> nodes(2 * lk.leaves - 1);
  for (std::size_t i = 0; i < lk.leaves; ++i) {
    nodes[i] = {{"id", i}, {"name", result.leaf_names[i]}, {"label", result.labels[i]}};
  }
  for (std::size_t i = 0; i < lk.merges.size(); ++i) {
    const auto& m = lk.merges[i];
    nodes[lk.leaves + i] = {{"id", lk.leaves + i},
                            {"height", m.height},
                            {"size", m.size},
                            {"children", {std::move(nodes[m.left]), std::move(nodes[m.right])}}};
  }
  doc["tree"] = std::move(nodes.back());
  return doc.dump(2) + "\n";
}

std::string dendrogram_text(const ClusteringResult& result) {
  const auto& lk = result.linkage;
  std::string out;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{2 * lk.leaves - 2, 0}};
  while (!stack.empty()) {
    const auto [id, depth] = stack.back();
    stack.pop_back();
    const std::string indent(2 * depth, ' ');
    if (id < lk.leaves) {
      out += fmt::format("{}- {} [cluster {}]\n", indent, result.leaf_names[id], result.labels[id]);
    } else {
      const auto& m = lk.merges[id - lk.leaves];
      out += fmt::format("{}+ #{} height={:.6f} size={}\n", indent, id, m.height, m.size);
      stack.emplace_back(m.right, depth + 1);
      stack.emplace_back(m.left, depth + 1);
    }
  }
  return out;
}

void export_dendrogram(const ClusteringResult& result, const std::filesystem::path& json_path) {
  std::ofstream out(json_path);
  if (!out) throw ParseError(fmt::format("cannot write '{}'", json_path.string()));
  out << dendrogram_json(result);
}

ClusteringResult parse_dendrogram(std::string_view json_text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }
  ClusteringResult result;
  try {
    for (const auto& code : doc.at("features")) {
      const auto flag = parse_flag(code.get<std::string>());
      if (!flag) throw ParseError(fmt::format("{}: unknown feature '{}'", origin, code.get<std::string>()));
      result.features.push_back(*flag);
    }
    result.k = doc.at("k").get<std::size_t>();
    result.leaf_names = doc.at("leaves").get<std::vector<std::string>>();
    const auto stored = doc.at("labels").get<std::vector<int>>();
    result.linkage.leaves = result.leaf_names.size();
    for (const auto& m : doc.at("merges")) {
      result.linkage.merges.push_back({m.at("left").get<std::size_t>(), m.at("right").get<std::size_t>(),
                                       m.at("height").get<double>(), m.at("size").get<std::size_t>()});
    }
    try {
      result.labels = cut_linkage(result.linkage, result.k);
    } catch (const ValidationError& e) {
      throw ParseError(fmt::format("{}: {}", origin, e.what()));
    }
    if (stored != result.labels) throw ParseError(fmt::format("{}: stored labels do not match the cut", origin));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }
  return result;
}

ClusteringResult load_dendrogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dendrogram(ss.str(), path.string());
}

}  // namespace wdsr
