// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gplan/cot.hpp"
#include "gplan/dataset.hpp"
#include "gplan/plan.hpp"
#include "gplan/trainer.hpp"

namespace gplan {

class NoTemplateMatch : public std::runtime_error {
public:
  NoTemplateMatch() : std::runtime_error("no scenario template matches") {}
};

/// The five perturbable spatiotemporal dimensions.
enum class StDimension { Time, Location, City, Weekend, Holiday };

const char* st_dimension_name(StDimension d);

/// Declarative trigger over spatiotemporal context and history.
struct TriggerSpec {
  std::vector<std::string> requires_history;  // every entry must appear
  std::optional<bool> cross_city;  // st.city != profile home_city
  std::optional<std::pair<int, int>> hour_range;      // inclusive
  std::optional<std::pair<int, int>> hour_range_alt;  // matches either range
  std::optional<bool> weekend;
  std::optional<bool> holiday;

  bool matches(const ContextBundle& ctx) const;
};

/// Intent skeleton entry; parameter values may carry the "{city}"
/// placeholder, substituted from the context at instantiation.
struct IntentTemplate {
  std::string tool;
  std::map<std::string, std::string> params;
};

/// One synthesis scenario: trigger, ready-to-instantiate plan skeleton
/// (filter-valid by construction), and CoT text patterns per block.
struct ScenarioTemplate {
  std::string id;
  TriggerSpec trigger;
  std::vector<IntentTemplate> skeleton;
  std::string context_pattern;
  std::string strategy_pattern;
  std::vector<std::string> step_patterns;  // one per skeleton entry

  nlohmann::json to_json() const;
  static ScenarioTemplate from_json(const nlohmann::json& j);
};

struct CityBox {
  double lat_lo, lat_hi, lon_lo, lon_hi;
  bool contains(double lat, double lon) const {
    return lat >= lat_lo && lat <= lat_hi && lon >= lon_lo && lon <= lon_hi;
  }
};

const std::map<std::string, CityBox>& city_boxes();
ToolLibrary default_library();
std::vector<ScenarioTemplate> default_templates();

std::vector<ScenarioTemplate> templates_from_json(const nlohmann::json& j);
nlohmann::json templates_to_json(const std::vector<ScenarioTemplate>& ts);

struct BuildResult {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> test;
  std::vector<PairRecord> pairs;
  std::size_t corrupted = 0;
};

/// Deterministic stand-in for the LLM teacher: seeded context generator,
/// template-driven CoT + plan synthesis, counterfactual perturbations,
/// and full corpus assembly.
class Synthesizer {
public:
  Synthesizer(std::shared_ptr<const ToolLibrary> library,
              std::vector<ScenarioTemplate> templates);

  const ScenarioTemplate* match_template(const ContextBundle& ctx) const;

  /// Seeded context draw; retries until some template trigger matches.
  ContextBundle generate_context(std::uint64_t seed) const;

  /// Instantiates the first matching template. Throws NoTemplateMatch.
  std::pair<StructuredCot, Plan> simulate_teacher(const ContextBundle& ctx,
                                                  std::uint64_t seed) const;

  /// Returns a context differing from `x` exactly on the chosen
  /// dimensions, with derived flags kept consistent.
  ContextBundle perturb_context(const ContextBundle& x,
                                const std::set<StDimension>& dimensions,
                                std::uint64_t seed) const;

  /// n samples with a 1% (min 10) holdout and bidirectional
  /// counterfactual pairs; `corrupt_p` plants per-tier violations in the
  /// emitted train/test records (pairs stay clean).
  BuildResult build_dataset(std::size_t n, std::uint64_t seed,
                            double corrupt_p = 0.0) const;

  const std::shared_ptr<const ToolLibrary>& library() const {
    return library_;
  }

private:
  std::shared_ptr<const ToolLibrary> library_;
  std::vector<ScenarioTemplate> templates_;
};

}  // namespace gplan
