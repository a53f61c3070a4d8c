// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gplan/dataset.hpp"
#include "gplan/plan.hpp"

namespace gplan {

enum class FilterTier { Format, Schema, Logic };

const char* filter_tier_name(FilterTier tier);

/// Outcome of one filter check. `tier` names the first failing tier and
/// is present iff the record failed.
struct FilterVerdict {
  bool pass = true;
  std::optional<FilterTier> tier;
  std::string code;
  std::string message;

  static FilterVerdict ok() { return FilterVerdict{}; }
  static FilterVerdict reject(FilterTier tier, std::string code,
                              std::string message) {
    return FilterVerdict{false, tier, std::move(code), std::move(message)};
  }

  nlohmann::json to_json() const;
};

/// Format tier: JSON parsability, array-of-intents shape, and plan length.
FilterVerdict check_format(const std::string& raw_text,
                           const ToolLibrary& library);

/// Schema tier: tools exist in the library, required parameters are
/// present, enum-constrained values are admissible.
FilterVerdict check_schema(const Plan& plan, const ToolLibrary& library);

/// Logic tier: every "$ref:<label>" resolves to an earlier producer of
/// that label, and exclusivity-class counts respect their bounds.
FilterVerdict check_logic(const Plan& plan, const ToolLibrary& library);

/// All three tiers in order; stops at the first failure. Returns the
/// parsed plan when the format tier passed.
FilterVerdict check_plan_text(const std::string& raw_text,
                              const ToolLibrary& library,
                              std::optional<Plan>* parsed = nullptr);

struct FilterReport {
  std::vector<DatasetRecord> kept;
  std::vector<std::pair<DatasetRecord, FilterVerdict>> rejected;
  double removal_rate = 0.0;

  std::size_t total() const { return kept.size() + rejected.size(); }
};

/// Order-preserving partition of a corpus by the three-tier filter.
FilterReport filter_dataset(const std::vector<DatasetRecord>& records,
                            const ToolLibrary& library);

}  // namespace gplan
