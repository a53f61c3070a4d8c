// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gplan {

/// Raised when plan text fails the format tier: malformed JSON, wrong
/// top-level shape, or a length outside [1, max_plan_length].
class FormatError : public std::runtime_error {
public:
  FormatError(std::size_t position, std::string reason)
      : std::runtime_error("format error at " + std::to_string(position) +
                           ": " + reason),
        position(position), reason(std::move(reason)) {}

  std::size_t position;
  std::string reason;
};

/// Schema entry for one tool in the intent library.
struct ToolSpec {
  std::string name;
  std::set<std::string> required_params;
  std::set<std::string> optional_params;
  std::map<std::string, std::set<std::string>> enum_params;
  std::set<std::string> produces;
  std::set<std::string> consumes;
  std::optional<std::string> exclusivity_class;
  int exclusivity_bound = 1;

  bool operator==(const ToolSpec&) const = default;
};

/// The fixed tool library plus the configured plan-length bound.
class ToolLibrary {
public:
  ToolLibrary() = default;
  explicit ToolLibrary(std::vector<ToolSpec> tools, int max_plan_length = 8);

  const ToolSpec* find(const std::string& name) const;
  const std::vector<ToolSpec>& tools() const { return tools_; }
  int max_plan_length() const { return max_plan_length_; }
  bool empty() const { return tools_.empty(); }

  static ToolLibrary from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

private:
  std::vector<ToolSpec> tools_;
  std::map<std::string, std::size_t> index_;
  int max_plan_length_ = 8;
};

/// One parameterized tool invocation. Parameter values are plain strings
/// or reference tokens of the form "$ref:<label>".
struct Intent {
  std::string tool;
  std::map<std::string, std::string> params;

  bool operator==(const Intent&) const = default;
};

/// Ordered intent sequence.
struct Plan {
  std::vector<Intent> intents;

  std::size_t size() const { return intents.size(); }
  bool empty() const { return intents.empty(); }
  bool operator==(const Plan&) const = default;
};

/// If `value` is a "$ref:<label>" token, returns the label.
std::optional<std::string> ref_label(const std::string& value);

/// Parses plan text. Format tier only: well-formed JSON array of
/// {tool, params} objects with length in [1, max]; no schema or logic
/// checks happen here. Throws FormatError.
Plan parse_plan(const std::string& text, const ToolLibrary& library);

/// Canonical single-line serialization: keys sorted, no insignificant
/// whitespace. parse_plan(serialize_plan(p)) == p.
std::string serialize_plan(const Plan& plan);
std::string serialize_intent(const Intent& intent);

Plan plan_from_json(const nlohmann::json& j, const ToolLibrary& library);
nlohmann::json plan_to_json(const Plan& plan);

/// Spatiotemporal slice of the input context. `time` is UTC epoch
/// seconds; is_weekend is derived from it, is_holiday is an independent
/// calendar flag.
struct SpatioTemporalContext {
  std::int64_t time = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::string city;
  bool is_weekend = false;
  bool is_holiday = false;

  int hour_of_day() const;
  int day_of_week() const;  // 0 = Sunday .. 6 = Saturday
  static bool weekend_for(std::int64_t epoch_seconds);
  void validate() const;

  bool operator==(const SpatioTemporalContext&) const = default;
};

/// Full model input: user profile, history, spatiotemporal context, and
/// the tool library the plan must draw from.
struct ContextBundle {
  std::map<std::string, std::string> user;
  std::vector<std::string> history;
  SpatioTemporalContext st;
  std::shared_ptr<const ToolLibrary> library;

  bool same_user_and_history(const ContextBundle& other) const {
    return user == other.user && history == other.history;
  }
};

nlohmann::json context_to_json(const ContextBundle& ctx);
ContextBundle context_from_json(const nlohmann::json& j,
                                std::shared_ptr<const ToolLibrary> library);

}  // namespace gplan
