// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/plan.hpp"

using nlohmann::json;

namespace gplan {

ToolLibrary::ToolLibrary(std::vector<ToolSpec> tools, int max_plan_length)
    : tools_(std::move(tools)), max_plan_length_(max_plan_length) {
  if (max_plan_length_ < 1)
    throw std::invalid_argument("max_plan_length must be >= 1");
  for (std::size_t i = 0; i < tools_.size(); ++i) {
    const ToolSpec& t = tools_[i];
    if (t.name.empty()) throw std::invalid_argument("tool name empty");
    if (!index_.emplace(t.name, i).second)
      throw std::invalid_argument("duplicate tool name: " + t.name);
    if (t.exclusivity_class && t.exclusivity_bound < 1)
      throw std::invalid_argument("exclusivity bound must be >= 1: " + t.name);
    for (const auto& [param, values] : t.enum_params) {
      if (!t.required_params.count(param) && !t.optional_params.count(param))
        throw std::invalid_argument("enum param not declared: " + t.name +
                                    "." + param);
      (void)values;
    }
  }
}

const ToolSpec* ToolLibrary::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &tools_[it->second];
}

namespace {

std::set<std::string> string_set(const json& j) {
  std::set<std::string> out;
  for (const auto& v : j) out.insert(v.get<std::string>());
  return out;
}

json set_to_json(const std::set<std::string>& s) {
  return json(std::vector<std::string>(s.begin(), s.end()));
}

}  // namespace

ToolLibrary ToolLibrary::from_json(const json& j) {
  const json& arr = j.is_array() ? j : j.at("tools");
  int max_len = j.is_object() ? j.value("max_plan_length", 8) : 8;
  std::vector<ToolSpec> tools;
  for (const auto& t : arr) {
    ToolSpec spec;
    spec.name = t.at("name").get<std::string>();
    if (t.contains("required_params"))
      spec.required_params = string_set(t["required_params"]);
    if (t.contains("optional_params"))
      spec.optional_params = string_set(t["optional_params"]);
    if (t.contains("enum_params"))
      for (const auto& [k, v] : t["enum_params"].items())
        spec.enum_params[k] = string_set(v);
    if (t.contains("produces")) spec.produces = string_set(t["produces"]);
    if (t.contains("consumes")) spec.consumes = string_set(t["consumes"]);
    if (t.contains("exclusivity_class") && !t["exclusivity_class"].is_null()) {
      spec.exclusivity_class = t["exclusivity_class"].get<std::string>();
      spec.exclusivity_bound = t.value("exclusivity_bound", 1);
    }
    tools.push_back(std::move(spec));
  }
  return ToolLibrary(std::move(tools), max_len);
}

json ToolLibrary::to_json() const {
  json arr = json::array();
  for (const ToolSpec& t : tools_) {
    json spec;
    spec["name"] = t.name;
    spec["required_params"] = set_to_json(t.required_params);
    spec["optional_params"] = set_to_json(t.optional_params);
    json enums = json::object();
    for (const auto& [k, v] : t.enum_params) enums[k] = set_to_json(v);
    spec["enum_params"] = enums;
    spec["produces"] = set_to_json(t.produces);
    spec["consumes"] = set_to_json(t.consumes);
    if (t.exclusivity_class) {
      spec["exclusivity_class"] = *t.exclusivity_class;
      spec["exclusivity_bound"] = t.exclusivity_bound;
    }
    arr.push_back(std::move(spec));
  }
  return json{{"max_plan_length", max_plan_length_}, {"tools", arr}};
}

std::optional<std::string> ref_label(const std::string& value) {
  constexpr const char* kPrefix = "$ref:";
  constexpr std::size_t kPrefixLen = 5;
  if (value.size() <= kPrefixLen || value.compare(0, kPrefixLen, kPrefix) != 0)
    return std::nullopt;
  return value.substr(kPrefixLen);
}

Plan plan_from_json(const json& j, const ToolLibrary& library) {
  if (!j.is_array())
    throw FormatError(0, "top-level value must be a JSON array");
  Plan plan;
  std::size_t idx = 0;
  for (const auto& item : j) {
    if (!item.is_object())
      throw FormatError(idx, "plan element is not an object");
    if (!item.contains("tool") || !item["tool"].is_string())
      throw FormatError(idx, "missing or non-string \"tool\"");
    if (!item.contains("params") || !item["params"].is_object())
      throw FormatError(idx, "missing or non-object \"params\"");
    if (item.size() != 2)
      throw FormatError(idx, "unexpected key in plan element");
    Intent intent;
    intent.tool = item["tool"].get<std::string>();
    if (intent.tool.empty()) throw FormatError(idx, "empty tool name");
    for (const auto& [k, v] : item["params"].items()) {
      if (!v.is_string())
        throw FormatError(idx, "non-string value for param \"" + k + "\"");
      intent.params[k] = v.get<std::string>();
    }
    plan.intents.push_back(std::move(intent));
    ++idx;
  }
  const std::size_t max_len =
      static_cast<std::size_t>(library.max_plan_length());
  if (plan.intents.empty())
    throw FormatError(0, "plan length 0 is below the minimum of 1");
  if (plan.intents.size() > max_len)
    throw FormatError(plan.intents.size(),
                      "plan length " + std::to_string(plan.intents.size()) +
                          " exceeds the maximum of " + std::to_string(max_len));
  return plan;
}

Plan parse_plan(const std::string& text, const ToolLibrary& library) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(e.byte, e.what());
  }
  return plan_from_json(j, library);
}

json plan_to_json(const Plan& plan) {
  json arr = json::array();
  for (const Intent& intent : plan.intents)
    arr.push_back(json{{"params", intent.params}, {"tool", intent.tool}});
  return arr;
}

std::string serialize_intent(const Intent& intent) {
  return json{{"params", intent.params}, {"tool", intent.tool}}.dump();
}

std::string serialize_plan(const Plan& plan) { return plan_to_json(plan).dump(); }

int SpatioTemporalContext::hour_of_day() const {
  std::int64_t sec = ((time % 86400) + 86400) % 86400;
  return static_cast<int>(sec / 3600);
}

int SpatioTemporalContext::day_of_week() const {
  std::int64_t days = time / 86400;
  if (time % 86400 < 0) --days;
  return static_cast<int>((((days + 4) % 7) + 7) % 7);  // epoch day 0 = Thursday
}

bool SpatioTemporalContext::weekend_for(std::int64_t epoch_seconds) {
  SpatioTemporalContext probe;
  probe.time = epoch_seconds;
  int dow = probe.day_of_week();
  return dow == 0 || dow == 6;
}

void SpatioTemporalContext::validate() const {
  if (lat < -90.0 || lat > 90.0)
    throw std::invalid_argument("latitude out of range");
  if (lon < -180.0 || lon > 180.0)
    throw std::invalid_argument("longitude out of range");
}

json context_to_json(const ContextBundle& ctx) {
  return json{
      {"history", ctx.history},
      {"st",
       {{"city", ctx.st.city},
        {"is_holiday", ctx.st.is_holiday},
        {"is_weekend", ctx.st.is_weekend},
        {"lat", ctx.st.lat},
        {"lon", ctx.st.lon},
        {"time", ctx.st.time}}},
      {"user", ctx.user}};
}

ContextBundle context_from_json(const json& j,
                                std::shared_ptr<const ToolLibrary> library) {
  ContextBundle ctx;
  ctx.user = j.at("user").get<std::map<std::string, std::string>>();
  ctx.history = j.at("history").get<std::vector<std::string>>();
  const json& st = j.at("st");
  ctx.st.time = st.at("time").get<std::int64_t>();
  ctx.st.lat = st.at("lat").get<double>();
  ctx.st.lon = st.at("lon").get<double>();
  ctx.st.city = st.at("city").get<std::string>();
  ctx.st.is_weekend = st.at("is_weekend").get<bool>();
  ctx.st.is_holiday = st.at("is_holiday").get<bool>();
  ctx.st.validate();
  ctx.library = std::move(library);
  return ctx;
}

}  // namespace gplan
