// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "gplan/plan.hpp"
#include "gplan/synth.hpp"

using namespace gplan;

namespace {

ToolLibrary tiny_library() {
  std::vector<ToolSpec> tools;
  tools.push_back({.name = "ride_hail",
                   .required_params = {"origin", "dest"},
                   .produces = {"dest_poi"}});
  tools.push_back({.name = "food_nearby", .required_params = {"near"}});
  return ToolLibrary(std::move(tools), 8);
}

}  // namespace

TEST_CASE("parse_plan accepts a minimal well-formed plan") {
  ToolLibrary lib = tiny_library();
  Plan plan = parse_plan(
      R"([{"tool":"ride_hail","params":{"origin":"airport","dest":"hotel"}}])",
      lib);
  REQUIRE(plan.size() == 1);
  CHECK(plan.intents[0].tool == "ride_hail");
  CHECK(plan.intents[0].params.at("dest") == "hotel");
}

TEST_CASE("parse_plan rejects shape and length violations") {
  ToolLibrary lib = tiny_library();
  CHECK_THROWS_AS(parse_plan(R"({"tool":"x"})", lib), FormatError);
  CHECK_THROWS_AS(parse_plan("[]", lib), FormatError);
  CHECK_THROWS_AS(parse_plan("[{\"tool\":\"a\"", lib), FormatError);
  CHECK_THROWS_AS(parse_plan(R"([{"tool":"a"}])", lib), FormatError);
  CHECK_THROWS_AS(parse_plan(R"([{"tool":"a","params":{"k":1}}])", lib),
                  FormatError);
  CHECK_THROWS_AS(
      parse_plan(R"([{"tool":"a","params":{},"extra":1}])", lib), FormatError);

  // length above the configured maximum
  std::string many = "[";
  for (int i = 0; i < 9; ++i) {
    if (i) many += ",";
    many += R"({"tool":"food_nearby","params":{"near":"x"}})";
  }
  many += "]";
  CHECK_THROWS_AS(parse_plan(many, lib), FormatError);
}

TEST_CASE("serialize_plan is canonical and round-trips") {
  ToolLibrary lib = tiny_library();
  Plan plan;
  plan.intents.push_back(
      {"ride_hail", {{"origin", "airport"}, {"dest", "hotel"}}});
  std::string text = serialize_plan(plan);
  CHECK(text ==
        R"([{"params":{"dest":"hotel","origin":"airport"},"tool":"ride_hail"}])");
  CHECK(text.find(' ') == std::string::npos);
  CHECK(parse_plan(text, lib) == plan);
  CHECK(serialize_plan(parse_plan(text, lib)) == text);  // fixpoint
}

TEST_CASE("plans equal as values serialize identically") {
  Plan a, b;
  a.intents.push_back({"food_nearby", {{"near", "hotel"}}});
  Intent intent;
  intent.tool = "food_nearby";
  intent.params["near"] = "hotel";
  b.intents.push_back(intent);
  CHECK(serialize_plan(a) == serialize_plan(b));
}

TEST_CASE("round-trip identity over synthesized plans") {
  auto library = std::make_shared<ToolLibrary>(default_library());
  Synthesizer synth(library, default_templates());
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ContextBundle ctx = synth.generate_context(seed);
    auto [cot, plan] = synth.simulate_teacher(ctx, seed);
    (void)cot;
    CHECK(parse_plan(serialize_plan(plan), *library) == plan);
  }
}

TEST_CASE("ref_label recognizes reference tokens") {
  CHECK(ref_label("$ref:dest_poi") == std::string("dest_poi"));
  CHECK_FALSE(ref_label("dest_poi").has_value());
  CHECK_FALSE(ref_label("$ref:").has_value());
}

TEST_CASE("tool library invariants") {
  std::vector<ToolSpec> dup = {{.name = "a"}, {.name = "a"}};
  CHECK_THROWS_AS(ToolLibrary(std::move(dup)), std::invalid_argument);

  std::vector<ToolSpec> bad_enum;
  bad_enum.push_back(
      {.name = "t", .enum_params = {{"ghost", {"x"}}}});
  CHECK_THROWS_AS(ToolLibrary(std::move(bad_enum)), std::invalid_argument);

  ToolLibrary lib = tiny_library();
  ToolLibrary reparsed = ToolLibrary::from_json(lib.to_json());
  CHECK(reparsed.to_json() == lib.to_json());
  CHECK(reparsed.max_plan_length() == 8);
  CHECK(reparsed.find("ride_hail") != nullptr);
  CHECK(reparsed.find("missing") == nullptr);
}

TEST_CASE("spatiotemporal context invariants and derivations") {
  SpatioTemporalContext st;
  st.time = 1767225600;  // 2026-01-01 is a Thursday
  CHECK(st.day_of_week() == 4);
  CHECK(st.hour_of_day() == 0);
  CHECK_FALSE(SpatioTemporalContext::weekend_for(st.time));
  CHECK(SpatioTemporalContext::weekend_for(st.time + 2 * 86400));  // Saturday

  st.lat = 91.0;
  CHECK_THROWS_AS(st.validate(), std::invalid_argument);
}

TEST_CASE("context bundle json round-trip") {
  auto library = std::make_shared<ToolLibrary>(default_library());
  Synthesizer synth(library, default_templates());
  ContextBundle ctx = synth.generate_context(7);
  ContextBundle back = context_from_json(context_to_json(ctx), library);
  CHECK(back.user == ctx.user);
  CHECK(back.history == ctx.history);
  CHECK(back.st == ctx.st);
}
