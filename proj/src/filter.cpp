// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/filter.hpp"

#include <map>
#include <set>

using nlohmann::json;

namespace gplan {

const char* filter_tier_name(FilterTier tier) {
  switch (tier) {
    case FilterTier::Format: return "FORMAT";
    case FilterTier::Schema: return "SCHEMA";
    case FilterTier::Logic: return "LOGIC";
  }
  return "UNKNOWN";
}

json FilterVerdict::to_json() const {
  json j{{"pass", pass}};
  if (!pass) {
    j["tier"] = filter_tier_name(*tier);
    j["code"] = code;
    j["message"] = message;
  }
  return j;
}

FilterVerdict check_format(const std::string& raw_text,
                           const ToolLibrary& library) {
  try {
    parse_plan(raw_text, library);
  } catch (const FormatError& e) {
    return FilterVerdict::reject(FilterTier::Format, "BAD_FORMAT", e.reason);
  }
  return FilterVerdict::ok();
}

FilterVerdict check_schema(const Plan& plan, const ToolLibrary& library) {
  for (const Intent& intent : plan.intents) {
    const ToolSpec* spec = library.find(intent.tool);
    if (!spec)
      return FilterVerdict::reject(FilterTier::Schema, "UNKNOWN_TOOL",
                                   "tool not in library: " + intent.tool);
    for (const std::string& param : spec->required_params)
      if (!intent.params.count(param))
        return FilterVerdict::reject(
            FilterTier::Schema, "MISSING_PARAM",
            intent.tool + " missing required param \"" + param + "\"");
    for (const auto& [param, admissible] : spec->enum_params) {
      auto it = intent.params.find(param);
      if (it != intent.params.end() && !admissible.count(it->second))
        return FilterVerdict::reject(
            FilterTier::Schema, "BAD_ENUM",
            intent.tool + "." + param + " value \"" + it->second +
                "\" not admissible");
    }
  }
  return FilterVerdict::ok();
}

FilterVerdict check_logic(const Plan& plan, const ToolLibrary& library) {
  std::set<std::string> produced;
  std::map<std::string, int> class_counts;
  std::map<std::string, int> class_bounds;

  for (std::size_t k = 0; k < plan.intents.size(); ++k) {
    const Intent& intent = plan.intents[k];
    for (const auto& [param, value] : intent.params) {
      auto label = ref_label(value);
      if (label && !produced.count(*label))
        return FilterVerdict::reject(
            FilterTier::Logic, "UNRESOLVED_REF",
            "intent " + std::to_string(k + 1) + " param \"" + param +
                "\" references \"" + *label + "\" with no earlier producer");
    }
    const ToolSpec* spec = library.find(intent.tool);
    if (spec) {
      produced.insert(spec->produces.begin(), spec->produces.end());
      if (spec->exclusivity_class) {
        const std::string& cls = *spec->exclusivity_class;
        int count = ++class_counts[cls];
        auto [it, inserted] =
            class_bounds.emplace(cls, spec->exclusivity_bound);
        if (!inserted)
          it->second = std::min(it->second, spec->exclusivity_bound);
        if (count > it->second)
          return FilterVerdict::reject(
              FilterTier::Logic, "EXCLUSIVITY",
              "class \"" + cls + "\" appears " + std::to_string(count) +
                  " times, bound " + std::to_string(it->second));
      }
    }
  }
  return FilterVerdict::ok();
}

FilterVerdict check_plan_text(const std::string& raw_text,
                              const ToolLibrary& library,
                              std::optional<Plan>* parsed) {
  FilterVerdict verdict = check_format(raw_text, library);
  if (!verdict.pass) return verdict;
  Plan plan = parse_plan(raw_text, library);
  if (parsed) *parsed = plan;
  verdict = check_schema(plan, library);
  if (!verdict.pass) return verdict;
  return check_logic(plan, library);
}

FilterReport filter_dataset(const std::vector<DatasetRecord>& records,
                            const ToolLibrary& library) {
  FilterReport report;
  for (const DatasetRecord& rec : records) {
    FilterVerdict verdict = check_plan_text(rec.plan_text(), library);
    if (verdict.pass)
      report.kept.push_back(rec);
    else
      report.rejected.emplace_back(rec, std::move(verdict));
  }
  report.removal_rate =
      records.empty() ? 0.0
                      : static_cast<double>(report.rejected.size()) /
                            static_cast<double>(records.size());
  return report;
}

}  // namespace gplan
