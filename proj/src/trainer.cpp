// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/trainer.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "gplan/metrics.hpp"

using nlohmann::json;

namespace gplan {

std::vector<std::string> render_prompt(const ContextBundle& ctx) {
  std::vector<std::string> tokens;
  tokens.push_back("<CTX>");
  for (const auto& [key, value] : ctx.user)
    tokens.push_back(key + "=" + value);
  std::string hist = "hist=";
  if (ctx.history.empty()) {
    hist += "none";
  } else {
    for (std::size_t i = 0; i < ctx.history.size(); ++i)
      hist += (i ? "|" : "") + ctx.history[i];
  }
  tokens.push_back(std::move(hist));
  // The spatiotemporal slice is fused into the token right before the
  // prompt end so that an order-2 policy conditions on it when it starts
  // scoring a response.
  tokens.push_back("st=" + ctx.st.city + ":" +
                   std::to_string(ctx.st.hour_of_day()) + ":" +
                   (ctx.st.is_weekend ? "1" : "0") + ":" +
                   (ctx.st.is_holiday ? "1" : "0"));
  tokens.push_back("</CTX>");
  return tokens;
}

std::vector<std::string> plan_tokens(const Plan& plan) {
  std::vector<std::string> tokens;
  tokens.reserve(plan.size() + 1);
  for (std::size_t i = 0; i < plan.intents.size(); ++i)
    tokens.push_back((i == 0 ? "[" : ",") + serialize_intent(plan.intents[i]));
  tokens.push_back("]");
  return tokens;
}

std::vector<std::string> CompiledRecord::prefix_tokens() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < targets.size(); ++i)
    if (mask[prompt.size() + i] == Section::Cot) out.push_back(targets[i]);
  return out;
}

SectionMask CompiledRecord::target_mask() const {
  return SectionMask(mask.begin() + static_cast<long>(prompt.size()),
                     mask.end());
}

json CompiledRecord::to_json() const {
  std::vector<std::string> sections;
  sections.reserve(mask.size());
  for (Section s : mask) sections.emplace_back(section_name(s));
  return json{{"B", total_blocks},
              {"json_target", json_target},
              {"prefix_tokens", prefix_tokens()},
              {"prompt", prompt},
              {"section_mask", sections},
              {"stage_b", stage_b}};
}

CompiledRecord compile_record(const DatasetRecord& record, int stage_b,
                              const LatentVocab& vocab) {
  if (!record.context.library)
    throw std::invalid_argument("record context has no library");
  StructuredCot cot = parse_cot(record.cot);
  const int total = cot.block_count();
  const int b = std::min(stage_b, total);
  ScaffoldPrefix prefix = compress(cot, b, vocab);
  Plan plan = plan_from_json(record.plan, *record.context.library);

  CompiledRecord out;
  out.prompt = render_prompt(record.context);
  out.stage_b = b;
  out.total_blocks = total;
  out.json_target = serialize_plan(plan);

  out.mask.assign(out.prompt.size(), Section::Prompt);
  for (const std::string& tok : prefix.tokens) {
    out.targets.push_back(tok);
    out.mask.push_back(Section::Cot);
  }
  for (std::string& tok : plan_tokens(plan)) {
    out.targets.push_back(std::move(tok));
    out.mask.push_back(Section::Json);
  }
  out.targets.push_back(kEndToken);
  out.mask.push_back(Section::Json);
  return out;
}

std::vector<std::string> build_vocab(
    const std::vector<const std::vector<DatasetRecord>*>& datasets,
    const LatentVocab& vocab, const std::vector<std::string>& extra) {
  std::set<std::string> tokens(extra.begin(), extra.end());
  for (const std::string& t : vocab.all_tokens()) tokens.insert(t);
  tokens.insert(kBosToken);
  tokens.insert(kEndToken);
  for (const auto* dataset : datasets) {
    for (const DatasetRecord& record : *dataset) {
      CompiledRecord compiled = compile_record(record, 0, vocab);
      tokens.insert(compiled.prompt.begin(), compiled.prompt.end());
      tokens.insert(compiled.targets.begin(), compiled.targets.end());
    }
  }
  return std::vector<std::string>(tokens.begin(), tokens.end());
}

std::vector<std::string> pair_tokens(const std::vector<PairRecord>& pairs) {
  std::set<std::string> tokens;
  for (const PairRecord& rec : pairs) {
    for (const std::string& t : render_prompt(rec.pair.prompt))
      tokens.insert(t);
    for (const Plan* plan : {&rec.pair.chosen, &rec.pair.rejected}) {
      for (const std::string& t : plan_tokens(*plan)) tokens.insert(t);
    }
  }
  tokens.insert(kEndToken);
  return std::vector<std::string>(tokens.begin(), tokens.end());
}

namespace {

struct PositionedLosses {
  std::vector<double> losses;       // per target token
  std::vector<std::int64_t> keys;   // conditioning key per target token
  std::vector<int> targets;         // target index per position
};

PositionedLosses target_losses(const TabularPolicy& policy,
                               const CompiledRecord& record) {
  PositionedLosses out;
  std::vector<int> stream;
  stream.reserve(record.prompt.size() + record.targets.size() + 2);
  const int bos = policy.token_index(kBosToken);
  stream.push_back(bos);
  stream.push_back(bos);
  for (const std::string& t : record.prompt)
    stream.push_back(policy.token_index(t));
  for (const std::string& t : record.targets)
    stream.push_back(policy.token_index(t));

  const std::size_t start = 2 + record.prompt.size();
  for (std::size_t pos = start; pos < stream.size(); ++pos) {
    const std::int64_t key = policy.context_key(stream, pos);
    std::vector<double> logits = policy.row_logits(key);
    out.losses.push_back(-TabularPolicy::log_softmax_at(logits, stream[pos]));
    out.keys.push_back(key);
    out.targets.push_back(stream[pos]);
  }
  return out;
}

}  // namespace

SectionLoss ce_eval(const TabularPolicy& policy, const CompiledRecord& record) {
  PositionedLosses positioned = target_losses(policy, record);
  return section_loss(positioned.losses, record.target_mask());
}

SectionLoss ce_step(TabularPolicy& policy, const CompiledRecord& record,
                    double lr) {
  PositionedLosses positioned = target_losses(policy, record);
  const SectionMask mask = record.target_mask();
  const SectionLoss loss = section_loss(positioned.losses, mask);

  std::size_t cot_n = 0, json_n = 0;
  for (Section s : mask) {
    if (s == Section::Cot) ++cot_n;
    if (s == Section::Json) ++json_n;
  }

  // Full-batch gradient of the section-normalized loss for this record:
  // each position contributes (softmax - onehot) / (2 * section size).
  std::map<std::int64_t, std::vector<double>> grads;
  for (std::size_t i = 0; i < positioned.losses.size(); ++i) {
    const double weight =
        mask[i] == Section::Cot
            ? 1.0 / (2.0 * static_cast<double>(cot_n))
            : 1.0 / (2.0 * static_cast<double>(json_n));
    const std::int64_t key = positioned.keys[i];
    auto [it, inserted] = grads.try_emplace(key);
    if (inserted) it->second.assign(policy.vocab_size(), 0.0);
    std::vector<double> probs =
        TabularPolicy::softmax(policy.row_logits(key));
    for (int v = 0; v < policy.vocab_size(); ++v)
      it->second[v] += weight * probs[v];
    it->second[positioned.targets[i]] -= weight;
  }
  for (const auto& [key, grad] : grads) {
    std::vector<double>& row = policy.mutable_row(key);
    for (int v = 0; v < policy.vocab_size(); ++v) row[v] -= lr * grad[v];
  }
  return loss;
}

const char* lr_schedule_name(LrSchedule s) {
  switch (s) {
    case LrSchedule::Calr: return "calr";
    case LrSchedule::Cosine: return "cosine";
    case LrSchedule::Constant: return "constant";
  }
  return "unknown";
}

LrSchedule lr_schedule_from_name(const std::string& name) {
  if (name == "calr") return LrSchedule::Calr;
  if (name == "cosine") return LrSchedule::Cosine;
  if (name == "constant") return LrSchedule::Constant;
  throw std::invalid_argument("unknown lr schedule: " + name);
}

DecodeEval evaluate_decode(const std::vector<std::string>& tokens,
                           const LatentVocab& vocab,
                           const ToolLibrary& library) {
  DecodeEval eval;
  eval.tokens = tokens;

  auto close = std::find(tokens.begin(), tokens.end(), kThoughtClose);
  if (close == tokens.end()) {
    eval.diagnostic = validate_latent_prefix(tokens, 0, vocab);
    return eval;
  }
  std::string json_text;
  for (auto it = close + 1; it != tokens.end(); ++it) json_text += *it;
  try {
    eval.plan = parse_plan(json_text, library);
  } catch (const FormatError&) {
    eval.diagnostic =
        DiagnosticResult{false, DiagnosticCode::StepCountMismatch,
                         "undecodable JSON section"};
    return eval;
  }
  eval.diagnostic = validate_latent_prefix(
      tokens, static_cast<int>(eval.plan->size()), vocab);
  return eval;
}

PicdResult train_picd(const std::vector<DatasetRecord>& train,
                      const std::vector<DatasetRecord>& heldout,
                      const PicdOptions& options) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  const ToolLibrary& library = *train.front().context.library;
  const CurriculumConfig& cfg = options.curriculum;
  cfg.validate();

  LatentVocab latent(options.latent_k, library.max_plan_length());
  std::vector<std::string> vocab =
      build_vocab({&train, &heldout}, latent, options.extra_vocab);
  TabularPolicy policy(std::move(vocab), options.order);

  const long steps_per_epoch = static_cast<long>(train.size());
  const long total_steps = steps_per_epoch * cfg.epochs;
  CalrSchedule calr(cfg, total_steps);

  PicdResult result{std::move(policy), {}, {}};
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);

  long t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const int g = epoch * cfg.blocks_per_epoch;

    EpochReport report;
    report.epoch = epoch;
    report.stage_g = g;
    double sum_cot = 0.0, sum_json = 0.0, sum_combined = 0.0;

    for (std::size_t i = 0; i < order.size(); ++i, ++t) {
      const DatasetRecord& record = train[order[i]];
      CompiledRecord compiled = compile_record(record, g, latent);
      double lr = 0.0;
      switch (options.schedule) {
        case LrSchedule::Calr: lr = calr.lr_at_step(t, g); break;
        case LrSchedule::Cosine: lr = cosine_lr(t, total_steps, cfg.eta_struct); break;
        case LrSchedule::Constant: lr = cfg.eta_struct; break;
      }
      if (i == 0) report.lr_first = lr;
      report.lr_last = lr;
      SectionLoss loss = ce_step(result.policy, compiled, lr);
      sum_cot += loss.cot;
      sum_json += loss.json;
      sum_combined += loss.combined;
    }
    report.mean_cot = sum_cot / static_cast<double>(train.size());
    report.mean_json = sum_json / static_cast<double>(train.size());
    report.mean_combined = sum_combined / static_cast<double>(train.size());

    std::vector<DiagnosticResult> diagnostics;
    std::vector<DecodeEval> decodes;
    for (const DatasetRecord& record : heldout) {
      // Decodes are primed with the wrapper opener, matching the fixed
      // response format the curriculum trains.
      std::vector<std::string> prompt = render_prompt(record.context);
      prompt.push_back(kThoughtOpen);
      DecodeResult decode =
          result.policy.greedy_decode(prompt, options.max_decode_len);
      std::vector<std::string> tokens = {kThoughtOpen};
      tokens.insert(tokens.end(), decode.tokens.begin(), decode.tokens.end());
      DecodeEval eval = evaluate_decode(tokens, latent, library);
      diagnostics.push_back(eval.diagnostic);
      decodes.push_back(std::move(eval));
    }
    report.latent_valid = latent_valid_rate(diagnostics);
    result.epochs.push_back(report);
    if (epoch == cfg.epochs - 1) result.final_decodes = std::move(decodes);
  }
  return result;
}

json PairRecord::to_json() const {
  return json{{"anchor_id", anchor_id},
              {"chosen", plan_to_json(pair.chosen)},
              {"direction", direction},
              {"prompt", context_to_json(pair.prompt)},
              {"rejected", plan_to_json(pair.rejected)}};
}

PairRecord PairRecord::from_json(const json& j,
                                 std::shared_ptr<const ToolLibrary> library) {
  PairRecord rec;
  rec.pair.prompt = context_from_json(j.at("prompt"), library);
  rec.pair.chosen = plan_from_json(j.at("chosen"), *library);
  rec.pair.rejected = plan_from_json(j.at("rejected"), *library);
  rec.direction = j.at("direction").get<std::string>();
  rec.anchor_id = j.at("anchor_id").get<std::int64_t>();
  return rec;
}

namespace {

std::vector<std::string> response_tokens(const Plan& plan) {
  std::vector<std::string> tokens = plan_tokens(plan);
  tokens.push_back(kEndToken);
  return tokens;
}

double sequence_logp(const TabularPolicy& policy,
                     const std::vector<std::string>& response,
                     const std::vector<std::string>& prompt,
                     bool length_normalized) {
  double lp = policy.logprob(response, prompt);
  if (length_normalized && !response.empty())
    lp /= static_cast<double>(response.size());
  return lp;
}

/// Accumulates d(loss)/d(logits) for one scored response into `grads`.
void accumulate_response_grad(
    const TabularPolicy& policy, const std::vector<std::string>& prompt,
    const std::vector<std::string>& response, double upstream,
    std::map<std::int64_t, std::vector<double>>& grads) {
  std::vector<int> stream;
  const int bos = policy.token_index(kBosToken);
  stream.push_back(bos);
  stream.push_back(bos);
  for (const std::string& t : prompt) stream.push_back(policy.token_index(t));
  for (const std::string& t : response)
    stream.push_back(policy.token_index(t));

  const std::size_t start = 2 + prompt.size();
  for (std::size_t pos = start; pos < stream.size(); ++pos) {
    const std::int64_t key = policy.context_key(stream, pos);
    auto [it, inserted] = grads.try_emplace(key);
    if (inserted) it->second.assign(policy.vocab_size(), 0.0);
    // d logp / d z = onehot - softmax; upstream carries d loss / d logp.
    std::vector<double> probs = TabularPolicy::softmax(policy.row_logits(key));
    for (int v = 0; v < policy.vocab_size(); ++v)
      it->second[v] += upstream * -probs[v];
    it->second[stream[pos]] += upstream;
  }
}

}  // namespace

ScdpoPassStats scdpo_eval(const TabularPolicy& policy,
                          const TabularPolicy& reference,
                          const std::vector<PairRecord>& pairs,
                          const ScdpoConfig& cfg) {
  ScdpoPassStats stats;
  if (pairs.empty()) return stats;
  for (const PairRecord& rec : pairs) {
    const std::vector<std::string> prompt = render_prompt(rec.pair.prompt);
    const std::vector<std::string> chosen = response_tokens(rec.pair.chosen);
    const std::vector<std::string> rejected =
        response_tokens(rec.pair.rejected);

    const double lp_plus =
        sequence_logp(policy, chosen, prompt, cfg.length_normalized);
    const double lp_plus_ref =
        sequence_logp(reference, chosen, prompt, cfg.length_normalized);
    const double lp_minus =
        sequence_logp(policy, rejected, prompt, cfg.length_normalized);
    const double lp_minus_ref =
        sequence_logp(reference, rejected, prompt, cfg.length_normalized);

    const double r_plus = reward_shift(lp_plus, lp_plus_ref, cfg.beta);
    const double r_minus = reward_shift(lp_minus, lp_minus_ref, cfg.beta);
    LossBreakdown loss = scdpo_loss(r_plus, r_minus, cfg);

    stats.mean.r_plus += loss.r_plus;
    stats.mean.r_minus += loss.r_minus;
    stats.mean.l_dpo += loss.l_dpo;
    stats.mean.l_anchor += loss.l_anchor;
    stats.mean.l_gap_low += loss.l_gap_low;
    stats.mean.l_gap_high += loss.l_gap_high;
    stats.mean.l_center += loss.l_center;
    stats.mean.total += loss.total;
    stats.mean_gap += r_plus - r_minus;
    stats.mean_chosen_shift += lp_plus - lp_plus_ref;
    stats.mean_rejected_shift += lp_minus - lp_minus_ref;
  }
  const double n = static_cast<double>(pairs.size());
  stats.mean.r_plus /= n;
  stats.mean.r_minus /= n;
  stats.mean.l_dpo /= n;
  stats.mean.l_anchor /= n;
  stats.mean.l_gap_low /= n;
  stats.mean.l_gap_high /= n;
  stats.mean.l_center /= n;
  stats.mean.total /= n;
  stats.mean_gap /= n;
  stats.mean_chosen_shift /= n;
  stats.mean_rejected_shift /= n;
  return stats;
}

ScdpoResult train_scdpo(const TabularPolicy& initial,
                        const std::vector<PairRecord>& pairs,
                        const ScdpoTrainOptions& options) {
  options.config.validate();
  const ScdpoConfig& cfg = options.config;

  ScdpoResult result{initial, {}, {}};
  const TabularPolicy& reference = initial;  // frozen copy
  result.before = scdpo_eval(result.policy, reference, pairs, cfg);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const PairRecord& rec = pairs[idx];
      const std::vector<std::string> prompt = render_prompt(rec.pair.prompt);
      const std::vector<std::string> chosen = response_tokens(rec.pair.chosen);
      const std::vector<std::string> rejected =
          response_tokens(rec.pair.rejected);

      const double lp_plus =
          sequence_logp(result.policy, chosen, prompt, cfg.length_normalized);
      const double lp_plus_ref =
          sequence_logp(reference, chosen, prompt, cfg.length_normalized);
      const double lp_minus =
          sequence_logp(result.policy, rejected, prompt, cfg.length_normalized);
      const double lp_minus_ref =
          sequence_logp(reference, rejected, prompt, cfg.length_normalized);

      const double r_plus = reward_shift(lp_plus, lp_plus_ref, cfg.beta);
      const double r_minus = reward_shift(lp_minus, lp_minus_ref, cfg.beta);
      auto [d_rplus, d_rminus] = scdpo_grad(r_plus, r_minus, cfg);

      // d r / d logp_theta = beta (scaled by 1/len when normalizing).
      double chosen_scale = cfg.beta * d_rplus;
      double rejected_scale = cfg.beta * d_rminus;
      if (cfg.length_normalized) {
        chosen_scale /= static_cast<double>(chosen.size());
        rejected_scale /= static_cast<double>(rejected.size());
      }

      std::map<std::int64_t, std::vector<double>> grads;
      accumulate_response_grad(result.policy, prompt, chosen, chosen_scale,
                               grads);
      accumulate_response_grad(result.policy, prompt, rejected, rejected_scale,
                               grads);
      for (const auto& [key, grad] : grads) {
        std::vector<double>& row = result.policy.mutable_row(key);
        for (int v = 0; v < result.policy.vocab_size(); ++v)
          row[v] -= options.lr * grad[v];
      }
    }
  }
  result.after = scdpo_eval(result.policy, reference, pairs, cfg);
  return result;
}

}  // namespace gplan
