// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gplan/cot.hpp"
#include "gplan/curriculum.hpp"
#include "gplan/dataset.hpp"
#include "gplan/plan.hpp"
#include "gplan/policy.hpp"
#include "gplan/scdpo.hpp"

namespace gplan {

/// Deterministic rendering of a context bundle into prompt tokens.
std::vector<std::string> render_prompt(const ContextBundle& ctx);

/// The JSON plan as policy tokens: one token per intent (with its
/// leading "[" or ","), plus the closing "]". Concatenating the tokens
/// reproduces serialize_plan exactly.
std::vector<std::string> plan_tokens(const Plan& plan);

/// One sample compiled at a curriculum stage: prompt, latent-or-text CoT
/// prefix, JSON target, and the per-token section mask over the full
/// sequence (prompt + targets).
struct CompiledRecord {
  std::vector<std::string> prompt;
  std::vector<std::string> targets;  // CoT prefix tokens then JSON tokens
  SectionMask mask;                  // one label per prompt + target token
  int stage_b = 0;
  int total_blocks = 0;
  std::string json_target;

  std::vector<std::string> prefix_tokens() const;
  SectionMask target_mask() const;  // mask restricted to target tokens
  nlohmann::json to_json() const;
};

/// Compiles a record at stage b (clamped per sample to its block count).
CompiledRecord compile_record(const DatasetRecord& record, int stage_b,
                              const LatentVocab& vocab);

/// Vocabulary covering every compilation stage of the given datasets:
/// prompt tokens, stage-0 text tokens, the full latent inventory, JSON
/// tokens, and the structural tokens.
std::vector<std::string> build_vocab(
    const std::vector<const std::vector<DatasetRecord>*>& datasets,
    const LatentVocab& vocab,
    const std::vector<std::string>& extra = {});

/// One full-batch gradient step on the section-normalized loss of a
/// single record. Returns the loss at the pre-update parameters.
SectionLoss ce_step(TabularPolicy& policy, const CompiledRecord& record,
                    double lr);

/// Loss only, no update.
SectionLoss ce_eval(const TabularPolicy& policy, const CompiledRecord& record);

enum class LrSchedule { Calr, Cosine, Constant };

const char* lr_schedule_name(LrSchedule s);
LrSchedule lr_schedule_from_name(const std::string& name);

struct PicdOptions {
  CurriculumConfig curriculum;
  LrSchedule schedule = LrSchedule::Calr;
  int order = 1;
  std::uint64_t seed = 0;
  int latent_k = 3;
  std::size_t max_decode_len = 96;
  // Extra tokens folded into the policy vocabulary, typically the pair
  // corpus the preference step will score later.
  std::vector<std::string> extra_vocab;
};

struct EpochReport {
  int epoch = 0;
  int stage_g = 0;
  double lr_first = 0.0;
  double lr_last = 0.0;
  double mean_cot = 0.0;
  double mean_json = 0.0;
  double mean_combined = 0.0;
  std::optional<double> latent_valid;
};

struct DecodeEval {
  std::vector<std::string> tokens;
  std::optional<Plan> plan;
  DiagnosticResult diagnostic;
};

struct PicdResult {
  TabularPolicy policy;
  std::vector<EpochReport> epochs;
  std::vector<DecodeEval> final_decodes;  // one per held-out record
};

/// Splits a decoded token stream at the THOUGHT wrapper, parses the JSON
/// tail, and validates the latent prefix against the decode's own plan
/// length.
DecodeEval evaluate_decode(const std::vector<std::string>& tokens,
                           const LatentVocab& vocab,
                           const ToolLibrary& library);

/// The PICD loop: per-epoch progressive compression with the configured
/// LR schedule, reporting section losses and the held-out latent-valid
/// rate after every epoch.
PicdResult train_picd(const std::vector<DatasetRecord>& train,
                      const std::vector<DatasetRecord>& heldout,
                      const PicdOptions& options);

/// Serialized preference pair plus its provenance.
struct PairRecord {
  PreferencePair pair;
  std::string direction;  // "x" or "x_prime"
  std::int64_t anchor_id = 0;

  nlohmann::json to_json() const;
  static PairRecord from_json(const nlohmann::json& j,
                              std::shared_ptr<const ToolLibrary> library);
};

/// Every token the pair corpus can put in front of the policy: prompts
/// plus both responses of each pair.
std::vector<std::string> pair_tokens(const std::vector<PairRecord>& pairs);

struct ScdpoPassStats {
  LossBreakdown mean;
  double mean_gap = 0.0;
  double mean_chosen_shift = 0.0;    // mean log pi_theta - log pi_ref, chosen
  double mean_rejected_shift = 0.0;  // same for rejected responses
};

struct ScdpoTrainOptions {
  ScdpoConfig config;
  double lr = 0.05;
  int epochs = 1;
  std::uint64_t seed = 0;
};

struct ScdpoResult {
  TabularPolicy policy;
  ScdpoPassStats before;
  ScdpoPassStats after;
};

/// Evaluation pass: reward shifts and loss terms for every pair, no
/// updates.
ScdpoPassStats scdpo_eval(const TabularPolicy& policy,
                          const TabularPolicy& reference,
                          const std::vector<PairRecord>& pairs,
                          const ScdpoConfig& cfg);

/// SC-DPO training against a frozen reference via the closed-form
/// gradient chain through the sequence log-probabilities.
ScdpoResult train_scdpo(const TabularPolicy& initial,
                        const std::vector<PairRecord>& pairs,
                        const ScdpoTrainOptions& options);

}  // namespace gplan
