#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wdsr {

struct Indicator {
  std::string name;
  double raw = 0.0;
  double max_observed = 1.0;  ///< scaling denominator
  double weight = 1.0;

  [[nodiscard]] double scaled() const { return raw / max_observed; }
};

/// R = (1 / sum w) * sum w * i^2 over indicators scaled by their maximum.
/// Throws ValidationError when a scaled value leaves [0, 1] or a weight is
/// negative, and UndefinedInputError when the weights sum to zero.
double balaei_aggregate(std::span<const Indicator> indicators);

/// Reads `name,raw,max_observed,weight`.
std::vector<Indicator> load_indicators(const std::filesystem::path& path);

struct WprCriterion {
  std::string name;
  /// Resilience functions/properties the criterion evidences, e.g.
  /// "monitor", "redundancy".
  std::vector<std::string> tags;
};

struct WprCategory {
  std::string name;
  std::vector<WprCriterion> criteria;
};

/// Binary checklist scored one point per fulfilled criterion.
struct WprChecklist {
  std::vector<WprCategory> categories;

  [[nodiscard]] std::size_t total() const;
  /// Throws ValidationError on duplicate names or untagged criteria.
  void validate() const;
};

/// The six standard categories with 6 placeholder criteria each (36).
WprChecklist default_wpr_checklist();

WprChecklist load_wpr_checklist(const std::filesystem::path& path);
std::string wpr_checklist_to_json(const WprChecklist& checklist);

using WprAnswers = std::map<std::string, bool>;
WprAnswers load_wpr_answers(const std::filesystem::path& path);

/// Number of criteria answered true. Every criterion must be answered and
/// no unknown criterion may appear.
std::size_t wpr_score(const WprChecklist& checklist, const WprAnswers& answers);

}  // namespace wdsr
