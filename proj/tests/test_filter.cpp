// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <functional>

#include "gplan/filter.hpp"
#include "gplan/synth.hpp"

using namespace gplan;

namespace {

ToolLibrary schema_library() {
  std::vector<ToolSpec> tools;
  tools.push_back({.name = "ride_hail",
                   .required_params = {"origin", "dest"},
                   .optional_params = {"class"},
                   .enum_params = {{"class", {"comfort", "economy"}}},
                   .produces = {"destination"},
                   .exclusivity_class = "travel",
                   .exclusivity_bound = 1});
  tools.push_back({.name = "food_nearby", .required_params = {"near"}});
  return ToolLibrary(std::move(tools), 8);
}

Plan make_plan(std::vector<Intent> intents) {
  return Plan{std::move(intents)};
}

// Five archetype tools with fixed parameterizations, used to enumerate
// every plan of length <= 4 for the logic-tier oracle.
struct Archetype {
  Intent intent;
};

ToolLibrary oracle_library() {
  std::vector<ToolSpec> tools;
  tools.push_back({.name = "src_a", .produces = {"a"}});
  tools.push_back({.name = "src_b", .produces = {"b"}});
  tools.push_back({.name = "use_a", .required_params = {"x"}});
  tools.push_back({.name = "use_b", .required_params = {"x"}});
  tools.push_back({.name = "twin",
                   .exclusivity_class = "solo",
                   .exclusivity_bound = 1});
  return ToolLibrary(std::move(tools), 8);
}

std::vector<Archetype> oracle_archetypes() {
  return {
      {Intent{"src_a", {}}},
      {Intent{"src_b", {}}},
      {Intent{"use_a", {{"x", "$ref:a"}}}},
      {Intent{"use_b", {{"x", "$ref:b"}}}},
      {Intent{"twin", {}}},
  };
}

// Independent logic checker: resolves every reference by scanning the
// whole prefix against the library's producer sets, and counts
// exclusivity classes directly.
bool oracle_logic_ok(const Plan& plan, const ToolLibrary& library) {
  for (std::size_t k = 0; k < plan.intents.size(); ++k) {
    for (const auto& [param, value] : plan.intents[k].params) {
      auto label = ref_label(value);
      if (!label) continue;
      bool resolved = false;
      for (std::size_t j = 0; j < k && !resolved; ++j) {
        const ToolSpec* producer = library.find(plan.intents[j].tool);
        if (producer && producer->produces.count(*label)) resolved = true;
      }
      if (!resolved) return false;
    }
  }
  std::map<std::string, int> counts;
  std::map<std::string, int> bounds;
  for (const Intent& intent : plan.intents) {
    const ToolSpec* spec = library.find(intent.tool);
    if (!spec || !spec->exclusivity_class) continue;
    ++counts[*spec->exclusivity_class];
    auto it = bounds.find(*spec->exclusivity_class);
    if (it == bounds.end())
      bounds[*spec->exclusivity_class] = spec->exclusivity_bound;
    else
      it->second = std::min(it->second, spec->exclusivity_bound);
  }
  for (const auto& [cls, count] : counts)
    if (count > bounds.at(cls)) return false;
  return true;
}

}  // namespace

TEST_CASE("format tier verdicts") {
  ToolLibrary lib = schema_library();
  CHECK_FALSE(check_format("[{broken", lib).pass);
  CHECK(check_format("[{broken", lib).tier == FilterTier::Format);
  CHECK_FALSE(check_format("[]", lib).pass);
  CHECK(check_format(
            R"([{"tool":"a","params":{}},{"tool":"b","params":{}},{"tool":"c","params":{}}])",
            lib)
            .pass);  // format does not know about the library's tools
}

TEST_CASE("schema tier verdicts") {
  ToolLibrary lib = schema_library();

  FilterVerdict unknown = check_schema(
      make_plan({Intent{"teleport", {{"to", "moon"}}}}), lib);
  CHECK_FALSE(unknown.pass);
  CHECK(unknown.tier == FilterTier::Schema);
  CHECK(unknown.code == "UNKNOWN_TOOL");

  FilterVerdict missing = check_schema(
      make_plan({Intent{"ride_hail", {{"origin", "airport"}}}}), lib);
  CHECK(missing.code == "MISSING_PARAM");

  FilterVerdict bad_enum = check_schema(
      make_plan({Intent{"ride_hail",
                        {{"origin", "a"}, {"dest", "b"}, {"class", "luxury"}}}}),
      lib);
  CHECK(bad_enum.code == "BAD_ENUM");

  CHECK(check_schema(
            make_plan({Intent{"ride_hail",
                              {{"origin", "a"},
                               {"dest", "b"},
                               {"class", "economy"}}}}),
            lib)
            .pass);
}

TEST_CASE("logic tier verdicts") {
  ToolLibrary lib = schema_library();

  FilterVerdict unresolved = check_logic(
      make_plan({Intent{"food_nearby", {{"near", "$ref:destination"}}}}), lib);
  CHECK_FALSE(unresolved.pass);
  CHECK(unresolved.code == "UNRESOLVED_REF");

  FilterVerdict exclusive = check_logic(
      make_plan({Intent{"ride_hail", {{"origin", "a"}, {"dest", "b"}}},
                 Intent{"ride_hail", {{"origin", "c"}, {"dest", "d"}}}}),
      lib);
  CHECK_FALSE(exclusive.pass);
  CHECK(exclusive.code == "EXCLUSIVITY");

  // producer at position 1, consumer at position 3
  FilterVerdict forward = check_logic(
      make_plan({Intent{"ride_hail", {{"origin", "a"}, {"dest", "b"}}},
                 Intent{"food_nearby", {{"near", "mall"}}},
                 Intent{"food_nearby", {{"near", "$ref:destination"}}}}),
      lib);
  CHECK(forward.pass);
}

TEST_CASE("a record failing several tiers reports the earliest") {
  auto library = std::make_shared<ToolLibrary>(schema_library());
  DatasetRecord rec;
  rec.context.library = library;
  rec.cot = "";
  // unknown tool AND an unresolved ref: schema precedes logic
  rec.plan = nlohmann::json::parse(
      R"([{"tool":"teleport","params":{"near":"$ref:destination"}}])");
  FilterReport report = filter_dataset({rec}, *library);
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0].second.tier == FilterTier::Schema);
}

TEST_CASE("filter_dataset partitions and is idempotent") {
  auto library = std::make_shared<ToolLibrary>(default_library());
  Synthesizer synth(library, default_templates());
  BuildResult corpus = synth.build_dataset(60, 11, 0.4);

  FilterReport report = filter_dataset(corpus.train, *library);
  CHECK(report.total() == corpus.train.size());
  CHECK(report.removal_rate ==
        doctest::Approx(static_cast<double>(report.rejected.size()) /
                        static_cast<double>(corpus.train.size())));

  // every planted violation is caught at its planted tier
  for (const auto& [rec, verdict] : report.rejected) {
    REQUIRE_FALSE(rec.corrupt.is_null());
    CHECK(rec.corrupt.at("tier").get<std::string>() ==
          filter_tier_name(*verdict.tier));
  }
  // no clean record is rejected, no corrupted record is kept
  for (const DatasetRecord& rec : report.kept)
    CHECK(rec.corrupt.is_null());

  FilterReport again = filter_dataset(report.kept, *library);
  CHECK(again.rejected.empty());
  CHECK(again.removal_rate == 0.0);
}

TEST_CASE("clean corpus has removal rate zero") {
  auto library = std::make_shared<ToolLibrary>(default_library());
  Synthesizer synth(library, default_templates());
  BuildResult corpus = synth.build_dataset(40, 3);
  FilterReport report = filter_dataset(corpus.train, *library);
  CHECK(report.removal_rate == 0.0);
  CHECK(report.kept.size() == corpus.train.size());
}

TEST_CASE("logic tier agrees with the brute-force oracle") {
  ToolLibrary lib = oracle_library();
  std::vector<Archetype> archetypes = oracle_archetypes();

  long checked = 0;
  std::function<void(Plan&)> recurse = [&](Plan& plan) {
    if (!plan.intents.empty()) {
      bool expected = oracle_logic_ok(plan, lib);
      FilterVerdict verdict = check_logic(plan, lib);
      CHECK(verdict.pass == expected);
      ++checked;
    }
    if (plan.intents.size() == 4) return;
    for (const Archetype& a : archetypes) {
      plan.intents.push_back(a.intent);
      recurse(plan);
      plan.intents.pop_back();
    }
  };
  Plan plan;
  recurse(plan);
  CHECK(checked == 5 + 25 + 125 + 625);
}
