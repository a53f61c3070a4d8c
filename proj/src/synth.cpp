// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/synth.hpp"

#include <algorithm>
#include <random>

#include "gplan/filter.hpp"
#include "gplan/scdpo.hpp"

using nlohmann::json;

namespace gplan {

namespace {

constexpr std::int64_t kBaseEpoch = 1767225600;  // 2026-01-01T00:00:00Z

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Raw-engine draws keep synthesized corpora identical across standard
// library implementations.
std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) / 9007199254740992.0;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_real(rng);
}

std::string substitute(std::string text, const std::string& placeholder,
                       const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
  return text;
}

const std::vector<std::string>& city_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, box] : city_boxes()) out.push_back(name);
    return out;
  }();
  return names;
}

const std::vector<std::vector<std::string>> kHistoryPools = {
    {},
    {"commute_transit"},
    {"hotel_booking", "flight_booking"},
    {"hotel_checkin"},
    {"search_food"},
};

const std::vector<std::string> kTiers = {"basic", "gold", "silver"};

}  // namespace

const char* st_dimension_name(StDimension d) {
  switch (d) {
    case StDimension::Time: return "time";
    case StDimension::Location: return "location";
    case StDimension::City: return "city";
    case StDimension::Weekend: return "weekend";
    case StDimension::Holiday: return "holiday";
  }
  return "unknown";
}

bool TriggerSpec::matches(const ContextBundle& ctx) const {
  for (const std::string& needed : requires_history)
    if (std::find(ctx.history.begin(), ctx.history.end(), needed) ==
        ctx.history.end())
      return false;
  if (cross_city) {
    auto home = ctx.user.find("home_city");
    bool is_cross = home != ctx.user.end() && home->second != ctx.st.city;
    if (is_cross != *cross_city) return false;
  }
  const int hour = ctx.st.hour_of_day();
  if (hour_range || hour_range_alt) {
    bool in_range =
        (hour_range && hour >= hour_range->first && hour <= hour_range->second) ||
        (hour_range_alt && hour >= hour_range_alt->first &&
         hour <= hour_range_alt->second);
    if (!in_range) return false;
  }
  if (weekend && ctx.st.is_weekend != *weekend) return false;
  if (holiday && ctx.st.is_holiday != *holiday) return false;
  return true;
}

const std::map<std::string, CityBox>& city_boxes() {
  static const std::map<std::string, CityBox> boxes = {
      {"amberlyn", {35.0, 35.5, 115.0, 115.5}},
      {"baymont", {33.0, 33.5, 113.0, 113.5}},
      {"cedarfalls", {34.0, 34.5, 114.0, 114.5}},
      {"hillcrest", {32.0, 32.5, 112.0, 112.5}},
      {"lakeside", {31.0, 31.5, 111.0, 111.5}},
      {"riverton", {30.0, 30.5, 110.0, 110.5}},
  };
  return boxes;
}

ToolLibrary default_library() {
  std::vector<ToolSpec> tools;
  auto add = [&tools](const std::string& name,
                      std::set<std::string> required) -> ToolSpec& {
    ToolSpec spec;
    spec.name = name;
    spec.required_params = std::move(required);
    tools.push_back(std::move(spec));
    return tools.back();
  };

  ToolSpec& ride = add("ride_hail", {"origin", "dest"});
  ride.produces = {"dest_poi"};
  ride.exclusivity_class = "travel";

  ToolSpec& transit = add("transit_route", {"origin", "dest"});
  transit.produces = {"dest_poi"};
  transit.exclusivity_class = "travel";

  ToolSpec& checkin = add("hotel_checkin", {"hotel"});
  checkin.produces = {"hotel_poi"};
  checkin.consumes = {"dest_poi"};

  ToolSpec& food = add("food_nearby", {"near"});
  food.optional_params = {"price"};
  food.enum_params = {{"price", {"cheap", "high", "mid"}}};

  add("leisure_nearby", {"near"});
  add("scenic_spots", {"city"});
  add("coffee_nearby", {"near"});
  add("weather_today", {"city"});
  return ToolLibrary(std::move(tools), 8);
}

std::vector<ScenarioTemplate> default_templates() {
  std::vector<ScenarioTemplate> out;

  {
    ScenarioTemplate t;
    t.id = "cross_city_arrival";
    t.trigger.requires_history = {"hotel_booking"};
    t.trigger.cross_city = true;
    t.skeleton = {
        {"ride_hail", {{"origin", "airport"}, {"dest", "city_hotel"}}},
        {"hotel_checkin", {{"hotel", "$ref:dest_poi"}}},
        {"food_nearby", {{"near", "$ref:hotel_poi"}, {"price", "mid"}}},
        {"leisure_nearby", {{"near", "$ref:hotel_poi"}}},
        {"scenic_spots", {{"city", "{city}"}}},
    };
    t.context_pattern = "traveler just landed in {city} with a hotel booked";
    t.strategy_pattern = "anchor on reaching the hotel then expand nearby";
    t.step_patterns = {
        "ride_hail moves the user from the airport to the hotel",
        "hotel_checkin settles the stay at the booked hotel",
        "food_nearby surfaces dinner options around the hotel",
        "leisure_nearby adds venues within walking range",
        "scenic_spots previews {city} highlights for the trip",
    };
    out.push_back(std::move(t));
  }
  {
    ScenarioTemplate t;
    t.id = "holiday_travel";
    t.trigger.holiday = true;
    t.skeleton = {
        {"transit_route", {{"origin", "home"}, {"dest", "festival_grounds"}}},
        {"food_nearby", {{"near", "$ref:dest_poi"}}},
        {"leisure_nearby", {{"near", "$ref:dest_poi"}}},
        {"weather_today", {{"city", "{city}"}}},
    };
    t.context_pattern = "holiday crowds are expected across {city} today";
    t.strategy_pattern = "route to the festival then cover food and weather";
    t.step_patterns = {
        "transit_route brings the user to the festival grounds",
        "food_nearby finds meals around the destination",
        "leisure_nearby lists attractions at the destination",
        "weather_today checks conditions for outdoor plans",
    };
    out.push_back(std::move(t));
  }
  {
    ScenarioTemplate t;
    t.id = "hotel_evening";
    t.trigger.requires_history = {"hotel_checkin"};
    t.trigger.hour_range = {{18, 23}};
    t.skeleton = {
        {"food_nearby", {{"near", "hotel"}, {"price", "high"}}},
        {"leisure_nearby", {{"near", "hotel"}}},
        {"ride_hail", {{"origin", "hotel"}, {"dest", "night_market"}}},
    };
    t.context_pattern = "guest settled at the hotel is free for the evening";
    t.strategy_pattern = "serve dinner first then an evening outing";
    t.step_patterns = {
        "food_nearby proposes dinner close to the hotel",
        "leisure_nearby offers relaxed evening venues",
        "ride_hail covers the trip to the night market",
    };
    out.push_back(std::move(t));
  }
  {
    ScenarioTemplate t;
    t.id = "morning_commute";
    t.trigger.weekend = false;
    t.trigger.hour_range = {{7, 9}};
    t.skeleton = {
        {"transit_route", {{"origin", "home"}, {"dest", "office"}}},
        {"coffee_nearby", {{"near", "$ref:dest_poi"}}},
    };
    t.context_pattern = "weekday morning rush with a commute ahead";
    t.strategy_pattern = "get to the office then grab coffee";
    t.step_patterns = {
        "transit_route plans the ride to the office",
        "coffee_nearby picks a cafe by the destination",
    };
    out.push_back(std::move(t));
  }
  {
    ScenarioTemplate t;
    t.id = "weekend_leisure";
    t.trigger.weekend = true;
    t.trigger.hour_range = {{10, 17}};
    t.skeleton = {
        {"leisure_nearby", {{"near", "current"}}},
        {"food_nearby", {{"near", "current"}, {"price", "cheap"}}},
        {"scenic_spots", {{"city", "{city}"}}},
    };
    t.context_pattern = "relaxed weekend afternoon around {city}";
    t.strategy_pattern = "fill the afternoon with easy nearby options";
    t.step_patterns = {
        "leisure_nearby starts with venues at the current spot",
        "food_nearby adds an affordable bite close by",
        "scenic_spots rounds out the day across {city}",
    };
    out.push_back(std::move(t));
  }
  {
    ScenarioTemplate t;
    t.id = "dining";
    t.trigger.hour_range = {{11, 13}};
    t.trigger.hour_range_alt = {{17, 20}};
    t.skeleton = {
        {"food_nearby", {{"near", "current"}, {"price", "mid"}}},
        {"ride_hail", {{"origin", "current"}, {"dest", "restaurant_row"}}},
    };
    t.context_pattern = "meal time is close and the user is out in {city}";
    t.strategy_pattern = "recommend food then the ride to reach it";
    t.step_patterns = {
        "food_nearby leads with restaurants matching the hour",
        "ride_hail handles the hop to the restaurant row",
    };
    out.push_back(std::move(t));
  }
  return out;
}

json ScenarioTemplate::to_json() const {
  json trig = json::object();
  trig["requires_history"] = trigger.requires_history;
  if (trigger.cross_city) trig["cross_city"] = *trigger.cross_city;
  if (trigger.hour_range)
    trig["hour_range"] = {trigger.hour_range->first, trigger.hour_range->second};
  if (trigger.hour_range_alt)
    trig["hour_range_alt"] = {trigger.hour_range_alt->first,
                              trigger.hour_range_alt->second};
  if (trigger.weekend) trig["weekend"] = *trigger.weekend;
  if (trigger.holiday) trig["holiday"] = *trigger.holiday;

  json skel = json::array();
  for (const IntentTemplate& it : skeleton)
    skel.push_back(json{{"params", it.params}, {"tool", it.tool}});

  return json{{"context_pattern", context_pattern},
              {"id", id},
              {"skeleton", skel},
              {"step_patterns", step_patterns},
              {"strategy_pattern", strategy_pattern},
              {"trigger", trig}};
}

ScenarioTemplate ScenarioTemplate::from_json(const json& j) {
  ScenarioTemplate t;
  t.id = j.at("id").get<std::string>();
  const json& trig = j.at("trigger");
  t.trigger.requires_history =
      trig.value("requires_history", std::vector<std::string>{});
  if (trig.contains("cross_city"))
    t.trigger.cross_city = trig["cross_city"].get<bool>();
  if (trig.contains("hour_range"))
    t.trigger.hour_range = {trig["hour_range"][0].get<int>(),
                            trig["hour_range"][1].get<int>()};
  if (trig.contains("hour_range_alt"))
    t.trigger.hour_range_alt = {trig["hour_range_alt"][0].get<int>(),
                                trig["hour_range_alt"][1].get<int>()};
  if (trig.contains("weekend")) t.trigger.weekend = trig["weekend"].get<bool>();
  if (trig.contains("holiday")) t.trigger.holiday = trig["holiday"].get<bool>();
  for (const json& it : j.at("skeleton")) {
    IntentTemplate intent;
    intent.tool = it.at("tool").get<std::string>();
    intent.params =
        it.at("params").get<std::map<std::string, std::string>>();
    t.skeleton.push_back(std::move(intent));
  }
  t.context_pattern = j.at("context_pattern").get<std::string>();
  t.strategy_pattern = j.at("strategy_pattern").get<std::string>();
  t.step_patterns = j.at("step_patterns").get<std::vector<std::string>>();
  if (t.step_patterns.size() != t.skeleton.size())
    throw std::invalid_argument("step patterns must match skeleton length");
  return t;
}

std::vector<ScenarioTemplate> templates_from_json(const json& j) {
  std::vector<ScenarioTemplate> out;
  for (const json& t : j) out.push_back(ScenarioTemplate::from_json(t));
  return out;
}

json templates_to_json(const std::vector<ScenarioTemplate>& ts) {
  json arr = json::array();
  for (const ScenarioTemplate& t : ts) arr.push_back(t.to_json());
  return arr;
}

Synthesizer::Synthesizer(std::shared_ptr<const ToolLibrary> library,
                         std::vector<ScenarioTemplate> templates)
    : library_(std::move(library)), templates_(std::move(templates)) {
  if (!library_ || library_->empty())
    throw std::invalid_argument("synthesizer needs a nonempty tool library");
  if (templates_.empty())
    throw std::invalid_argument("synthesizer needs at least one template");
}

const ScenarioTemplate* Synthesizer::match_template(
    const ContextBundle& ctx) const {
  for (const ScenarioTemplate& t : templates_)
    if (t.trigger.matches(ctx)) return &t;
  return nullptr;
}

ContextBundle Synthesizer::generate_context(std::uint64_t seed) const {
  std::mt19937_64 rng(splitmix64(seed));
  const std::vector<std::string>& cities = city_names();

  for (int attempt = 0; attempt < 1000; ++attempt) {
    ContextBundle ctx;
    ctx.library = library_;
    const std::string& home = cities[pick(rng, cities.size())];
    ctx.user["home_city"] = home;
    ctx.user["tier"] = kTiers[pick(rng, kTiers.size())];
    ctx.history = kHistoryPools[pick(rng, kHistoryPools.size())];

    ctx.st.city = pick(rng, 2) == 0 ? home : cities[pick(rng, cities.size())];
    const std::int64_t day = static_cast<std::int64_t>(pick(rng, 364));
    const std::int64_t hour = static_cast<std::int64_t>(pick(rng, 24));
    const std::int64_t minute = static_cast<std::int64_t>(pick(rng, 60));
    ctx.st.time = kBaseEpoch + day * 86400 + hour * 3600 + minute * 60;
    ctx.st.is_weekend = SpatioTemporalContext::weekend_for(ctx.st.time);
    ctx.st.is_holiday = unit_real(rng) < 0.15;
    const CityBox& box = city_boxes().at(ctx.st.city);
    ctx.st.lat = uniform_in(rng, box.lat_lo, box.lat_hi);
    ctx.st.lon = uniform_in(rng, box.lon_lo, box.lon_hi);

    if (match_template(ctx)) return ctx;
  }
  throw NoTemplateMatch();
}

std::pair<StructuredCot, Plan> Synthesizer::simulate_teacher(
    const ContextBundle& ctx, std::uint64_t seed) const {
  (void)seed;  // instantiation is fully determined by the context
  const ScenarioTemplate* tmpl = match_template(ctx);
  if (!tmpl) throw NoTemplateMatch();

  Plan plan;
  for (const IntentTemplate& it : tmpl->skeleton) {
    Intent intent;
    intent.tool = it.tool;
    for (const auto& [key, value] : it.params)
      intent.params[key] = substitute(value, "{city}", ctx.st.city);
    plan.intents.push_back(std::move(intent));
  }

  StructuredCot cot;
  cot.blocks.push_back(
      {BlockKind::Context, 0,
       substitute(tmpl->context_pattern, "{city}", ctx.st.city)});
  cot.blocks.push_back(
      {BlockKind::Strategy, 0,
       substitute(tmpl->strategy_pattern, "{city}", ctx.st.city)});
  for (std::size_t i = 0; i < tmpl->step_patterns.size(); ++i)
    cot.blocks.push_back(
        {BlockKind::Step, static_cast<int>(i) + 1,
         substitute(tmpl->step_patterns[i], "{city}", ctx.st.city)});
  cot.validate();
  return {std::move(cot), std::move(plan)};
}

ContextBundle Synthesizer::perturb_context(
    const ContextBundle& x, const std::set<StDimension>& dimensions,
    std::uint64_t seed) const {
  if (dimensions.empty())
    throw std::invalid_argument("perturbation needs at least one dimension");
  std::mt19937_64 rng(splitmix64(seed));
  const std::vector<std::string>& cities = city_names();
  ContextBundle y = x;

  for (StDimension dim : dimensions) {
    switch (dim) {
      case StDimension::Time: {
        std::int64_t t = y.st.time;
        while (t == y.st.time) {
          const std::int64_t day = static_cast<std::int64_t>(pick(rng, 364));
          const std::int64_t hour = static_cast<std::int64_t>(pick(rng, 24));
          const std::int64_t minute = static_cast<std::int64_t>(pick(rng, 60));
          t = kBaseEpoch + day * 86400 + hour * 3600 + minute * 60;
        }
        y.st.time = t;
        break;
      }
      case StDimension::Location: {
        const CityBox& box = city_boxes().at(y.st.city);
        double lat = y.st.lat, lon = y.st.lon;
        while (lat == y.st.lat && lon == y.st.lon) {
          lat = uniform_in(rng, box.lat_lo, box.lat_hi);
          lon = uniform_in(rng, box.lon_lo, box.lon_hi);
        }
        y.st.lat = lat;
        y.st.lon = lon;
        break;
      }
      case StDimension::City: {
        std::string city = y.st.city;
        while (city == y.st.city) city = cities[pick(rng, cities.size())];
        y.st.city = city;
        const CityBox& box = city_boxes().at(city);
        y.st.lat = uniform_in(rng, box.lat_lo, box.lat_hi);
        y.st.lon = uniform_in(rng, box.lon_lo, box.lon_hi);
        break;
      }
      case StDimension::Weekend: {
        const bool original = SpatioTemporalContext::weekend_for(y.st.time);
        std::int64_t shift = 1;
        while (SpatioTemporalContext::weekend_for(y.st.time + shift * 86400) ==
               original)
          ++shift;
        y.st.time += shift * 86400;
        break;
      }
      case StDimension::Holiday:
        y.st.is_holiday = !y.st.is_holiday;
        break;
    }
  }
  y.st.is_weekend = SpatioTemporalContext::weekend_for(y.st.time);
  return y;
}

namespace {

struct Corruption {
  const char* tier;
  const char* code;
};

Corruption corrupt_record(DatasetRecord& rec, const ToolLibrary& library,
                          std::mt19937_64& rng) {
  Plan plan = plan_from_json(rec.plan, library);
  const std::size_t tier = pick(rng, 3);

  if (tier == 0) {  // FORMAT
    switch (pick(rng, 3)) {
      case 0: {
        std::string broken = serialize_plan(plan);
        rec.plan = broken.substr(0, broken.size() - 3);
        return {"FORMAT", "BAD_FORMAT"};
      }
      case 1:
        rec.plan = json{{"tool", "x"}};
        return {"FORMAT", "BAD_FORMAT"};
      default:
        rec.plan = json::array();
        return {"FORMAT", "BAD_FORMAT"};
    }
  }

  if (tier == 1) {  // SCHEMA
    std::size_t mode = pick(rng, 3);
    if (mode == 2) {
      for (Intent& intent : plan.intents) {
        const ToolSpec* spec = library.find(intent.tool);
        if (spec && !spec->enum_params.empty()) {
          intent.params[spec->enum_params.begin()->first] = "luxury";
          rec.plan = plan_to_json(plan);
          return {"SCHEMA", "BAD_ENUM"};
        }
      }
      mode = 0;  // no enum-capable intent; fall back
    }
    Intent& intent = plan.intents[pick(rng, plan.intents.size())];
    if (mode == 1) {
      const ToolSpec* spec = library.find(intent.tool);
      if (spec && !spec->required_params.empty()) {
        intent.params.erase(*spec->required_params.begin());
        rec.plan = plan_to_json(plan);
        return {"SCHEMA", "MISSING_PARAM"};
      }
    }
    intent.tool = "teleport";
    rec.plan = plan_to_json(plan);
    return {"SCHEMA", "UNKNOWN_TOOL"};
  }

  // LOGIC
  if (pick(rng, 2) == 0) {
    Intent& intent = plan.intents[pick(rng, plan.intents.size())];
    const ToolSpec* spec = library.find(intent.tool);
    intent.params[*spec->required_params.begin()] = "$ref:phantom";
    rec.plan = plan_to_json(plan);
    return {"LOGIC", "UNRESOLVED_REF"};
  }
  bool has_travel = false;
  for (const Intent& intent : plan.intents) {
    const ToolSpec* spec = library.find(intent.tool);
    if (spec && spec->exclusivity_class) has_travel = true;
  }
  const int extra = has_travel ? 1 : 2;
  for (int i = 0; i < extra; ++i)
    plan.intents.push_back(
        Intent{"ride_hail", {{"dest", "extra_stop"}, {"origin", "extra"}}});
  rec.plan = plan_to_json(plan);
  return {"LOGIC", "EXCLUSIVITY"};
}

}  // namespace

BuildResult Synthesizer::build_dataset(std::size_t n, std::uint64_t seed,
                                       double corrupt_p) const {
  if (n < 10) throw std::invalid_argument("dataset size must be >= 10");

  std::vector<DatasetRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t ctx_seed = splitmix64(seed ^ (i * 2 + 1));
    ContextBundle ctx = generate_context(ctx_seed);
    auto [cot, plan] = simulate_teacher(ctx, ctx_seed);
    DatasetRecord rec;
    rec.context = std::move(ctx);
    rec.cot = render_cot(cot);
    rec.plan = plan_to_json(plan);
    records.push_back(std::move(rec));
  }

  // Generator validity gate: everything synthesized must pass the filter.
  FilterReport gate = filter_dataset(records, *library_);
  if (!gate.rejected.empty())
    throw std::logic_error("synthesizer emitted a filter-rejected record");

  const std::size_t holdout = std::max<std::size_t>(10, n / 100);
  BuildResult result;
  result.train.assign(records.begin(),
                      records.begin() + static_cast<long>(n - holdout));
  result.test.assign(records.begin() + static_cast<long>(n - holdout),
                     records.end());

  // Counterfactual anchors over the training slice, one perturbed
  // context per record whose template trigger differs.
  constexpr StDimension kDims[] = {StDimension::Time, StDimension::Location,
                                   StDimension::City, StDimension::Weekend,
                                   StDimension::Holiday};
  for (std::size_t i = 0; i < result.train.size(); ++i) {
    const DatasetRecord& rec = result.train[i];
    const ScenarioTemplate* base = match_template(rec.context);
    std::mt19937_64 rng(splitmix64(seed ^ 0xabcd1234u ^ (i * 2)));
    for (int attempt = 0; attempt < 40; ++attempt) {
      std::set<StDimension> dims;
      dims.insert(kDims[pick(rng, 5)]);
      if (pick(rng, 2) == 0) dims.insert(kDims[pick(rng, 5)]);
      ContextBundle perturbed =
          perturb_context(rec.context, dims, rng());
      const ScenarioTemplate* other = match_template(perturbed);
      if (!other || other == base) continue;
      auto [cot2, plan2] = simulate_teacher(perturbed, 0);
      (void)cot2;
      Plan plan1 = plan_from_json(rec.plan, *library_);
      if (plan2 == plan1) continue;

      CounterfactualAnchor anchor{rec.context, perturbed, plan1, plan2};
      auto [forward, reverse] = materialize_pairs(anchor);
      const std::int64_t anchor_id = static_cast<std::int64_t>(i);
      result.pairs.push_back({std::move(forward), "x", anchor_id});
      result.pairs.push_back({std::move(reverse), "x_prime", anchor_id});
      break;
    }
  }

  if (corrupt_p > 0.0) {
    std::mt19937_64 rng(splitmix64(seed ^ 0x5eedc0de));
    auto corrupt_slice = [&](std::vector<DatasetRecord>& slice) {
      for (DatasetRecord& rec : slice) {
        if (unit_real(rng) >= corrupt_p) continue;
        Corruption planted = corrupt_record(rec, *library_, rng);
        rec.corrupt = json{{"code", planted.code}, {"tier", planted.tier}};
        ++result.corrupted;
      }
    };
    corrupt_slice(result.train);
    corrupt_slice(result.test);
  }
  return result;
}

}  // namespace gplan
