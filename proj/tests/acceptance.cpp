// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: every release criterion checked end to end, one
// pass/fail line per criterion. Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "gplan/cot.hpp"
#include "gplan/curriculum.hpp"
#include "gplan/filter.hpp"
#include "gplan/metrics.hpp"
#include "gplan/policy.hpp"
#include "gplan/scdpo.hpp"
#include "gplan/synth.hpp"
#include "gplan/trainer.hpp"

using namespace gplan;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail = "") {
  std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) / 9007199254740992.0;
}

// ------------------------------------------------------------ criterion 1

// Independent oracle: minimum cost over all monotone alignments, driven
// by a precomputed archetype substitution matrix.
double alignment_oracle(const std::vector<int>& pred,
                        const std::vector<int>& truth,
                        const std::vector<std::vector<double>>& sub) {
  const std::size_t m = pred.size(), n = truth.size();
  double best = static_cast<double>(m + n);  // delete all + insert all
  std::vector<std::pair<std::size_t, std::size_t>> matched;
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t fp,
                                                             std::size_t ft) {
    if (!matched.empty()) {
      double cost = 0.0;
      for (const auto& [i, j] : matched) cost += sub[pred[i]][truth[j]];
      cost += static_cast<double>(m - matched.size());
      cost += static_cast<double>(n - matched.size());
      if (cost < best) best = cost;
    }
    for (std::size_t i = fp; i < m; ++i)
      for (std::size_t j = ft; j < n; ++j) {
        matched.emplace_back(i, j);
        choose(i + 1, j + 1);
        matched.pop_back();
      }
  };
  choose(0, 0);
  return best;
}

void criterion_1() {
  const double start = now_seconds();
  // 3 tools x 2 param values
  std::vector<Intent> alphabet;
  for (const char* tool : {"a", "b", "c"})
    for (const char* value : {"1", "2"}) {
      Intent intent;
      intent.tool = tool;
      intent.params["p"] = value;
      alphabet.push_back(std::move(intent));
    }

  EditCosts costs;
  std::vector<std::vector<double>> sub(6, std::vector<double>(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      sub[i][j] = intent_substitution_cost(alphabet[i], alphabet[j], costs);

  // every index plan of length 0..4 (truth side starts at length 1)
  std::vector<std::vector<int>> plans;
  std::function<void(std::vector<int>&)> enumerate = [&](std::vector<int>& p) {
    plans.push_back(p);
    if (p.size() == 4) return;
    for (int k = 0; k < 6; ++k) {
      p.push_back(k);
      enumerate(p);
      p.pop_back();
    }
  };
  std::vector<int> scratch;
  enumerate(scratch);

  std::vector<Plan> materialized(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i)
    for (int k : plans[i]) materialized[i].intents.push_back(alphabet[k]);

  long mismatches = 0, pairs = 0;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    for (std::size_t j = 0; j < plans.size(); ++j) {
      if (plans[j].empty()) continue;  // the reference plan is nonempty
      ++pairs;
      double dp = plan_edit_distance(materialized[i], materialized[j], costs);
      double oracle = alignment_oracle(plans[i], plans[j], sub);
      if (std::abs(dp - oracle) > 1e-12) ++mismatches;
      if (!plans[i].empty()) {
        double sym =
            plan_edit_distance(materialized[j], materialized[i], costs);
        if (std::abs(dp - sym) > 1e-12) ++mismatches;
      }
    }
  }
  const double elapsed = now_seconds() - start;
  std::ostringstream detail;
  detail << pairs << " pairs, " << mismatches << " mismatches, "
         << elapsed << " s";
  report(1, "NES dynamic program equals the brute-force edit minimum",
         mismatches == 0 && elapsed < 10.0, detail.str());
}

// ------------------------------------------------------------ criterion 2

void criterion_2() {
  const double start = now_seconds();
  ScdpoConfig cfg;
  const double h = 1e-6;
  std::mt19937_64 rng(20260811);
  int tested = 0, bad = 0;
  while (tested < 1000) {
    double rp = 2.0 * unit_real(rng) - 1.0;
    double rm = 2.0 * unit_real(rng) - 1.0;
    double gap = rp - rm;
    if (std::abs(rp - cfg.delta) < 1e-4 ||
        std::abs(gap - cfg.gamma_low) < 1e-4 ||
        std::abs(gap - cfg.gamma_high) < 1e-4)
      continue;
    ++tested;
    auto [d_rplus, d_rminus] = scdpo_grad(rp, rm, cfg);
    double fd_plus = (scdpo_loss(rp + h, rm, cfg).total -
                      scdpo_loss(rp - h, rm, cfg).total) /
                     (2.0 * h);
    double fd_minus = (scdpo_loss(rp, rm + h, cfg).total -
                       scdpo_loss(rp, rm - h, cfg).total) /
                      (2.0 * h);
    if (std::abs(d_rplus - fd_plus) / std::max(1.0, std::abs(d_rplus)) > 1e-6)
      ++bad;
    if (std::abs(d_rminus - fd_minus) / std::max(1.0, std::abs(d_rminus)) >
        1e-6)
      ++bad;
  }

  // end-to-end over the logit table, V <= 6, both conditioning orders
  int table_bad = 0, table_checked = 0;
  for (int order : {1, 2}) {
    std::vector<std::string> vocab = {"p", "q", "u", "v", "w", "<END>"};
    TabularPolicy ref(vocab, order);
    std::mt19937_64 seed_rng(55 + order);
    const std::int64_t contexts =
        order == 1 ? ref.vocab_size()
                   : static_cast<std::int64_t>(ref.vocab_size()) *
                         ref.vocab_size();
    for (std::int64_t key = 0; key < contexts; ++key)
      for (double& z : ref.mutable_row(key)) z = unit_real(seed_rng) - 0.5;

    PairRecord pair;
    auto library = std::make_shared<ToolLibrary>(default_library());
    Synthesizer synth(library, default_templates());
    pair.pair.prompt = synth.generate_context(2);
    pair.pair.chosen.intents = {Intent{"scenic_spots", {{"city", "x"}}}};
    pair.pair.rejected.intents = {Intent{"weather_today", {{"city", "y"}}}};
    pair.direction = "x";

    // score over the tiny vocabulary: remap the responses onto it
    auto prompt = std::vector<std::string>{"p", "q"};
    auto chosen = std::vector<std::string>{"u", "v", "<END>"};
    auto rejected = std::vector<std::string>{"w", "u", "<END>"};

    auto loss_of = [&](const TabularPolicy& policy) {
      double rp = reward_shift(policy.logprob(chosen, prompt),
                               ref.logprob(chosen, prompt), cfg.beta);
      double rm = reward_shift(policy.logprob(rejected, prompt),
                               ref.logprob(rejected, prompt), cfg.beta);
      return scdpo_loss(rp, rm, cfg).total;
    };

    // analytic gradient: replicate one SGD step by hand through the
    // public training path on a synthetic pair record is not possible
    // with remapped tokens, so differentiate directly: d total / d z =
    // sum over responses of beta * dT/dr * (onehot - softmax).
    auto [d_rplus, d_rminus] = scdpo_grad(
        reward_shift(ref.logprob(chosen, prompt), ref.logprob(chosen, prompt),
                     cfg.beta),
        reward_shift(ref.logprob(rejected, prompt),
                     ref.logprob(rejected, prompt), cfg.beta),
        cfg);
    std::map<std::int64_t, std::vector<double>> grads;
    auto accumulate = [&](const std::vector<std::string>& response,
                          double upstream) {
      std::vector<int> stream;
      const int bos = ref.token_index(kBosToken);
      stream.push_back(bos);
      stream.push_back(bos);
      for (const auto& t : prompt) stream.push_back(ref.token_index(t));
      for (const auto& t : response) stream.push_back(ref.token_index(t));
      for (std::size_t pos = 2 + prompt.size(); pos < stream.size(); ++pos) {
        std::int64_t key = ref.context_key(stream, pos);
        auto [it, inserted] = grads.try_emplace(key);
        if (inserted) it->second.assign(ref.vocab_size(), 0.0);
        std::vector<double> probs = TabularPolicy::softmax(ref.row_logits(key));
        for (int v = 0; v < ref.vocab_size(); ++v)
          it->second[v] -= upstream * probs[v];
        it->second[stream[pos]] += upstream;
      }
    };
    accumulate(chosen, cfg.beta * d_rplus);
    accumulate(rejected, cfg.beta * d_rminus);

    for (const auto& [key, grad] : grads) {
      for (int v = 0; v < ref.vocab_size(); ++v) {
        TabularPolicy plus = ref;
        plus.mutable_row(key)[v] += h;
        TabularPolicy minus = ref;
        minus.mutable_row(key)[v] -= h;
        double fd = (loss_of(plus) - loss_of(minus)) / (2.0 * h);
        ++table_checked;
        if (std::abs(grad[v] - fd) / std::max(1.0, std::abs(grad[v])) > 1e-6)
          ++table_bad;
      }
    }
  }

  const double elapsed = now_seconds() - start;
  std::ostringstream detail;
  detail << tested << " scalar points (" << bad << " bad), " << table_checked
         << " table entries (" << table_bad << " bad), " << elapsed << " s";
  report(2, "SC-DPO analytic gradients match finite differences",
         bad == 0 && table_bad == 0 && table_checked > 0 && elapsed < 30.0,
         detail.str());
}

// ------------------------------------------------------------ criterion 3

void criterion_3() {
  // scalar reference, written out independently of the implementation
  const double expected = std::log(2.0) + 10.0 * 0.01;
  LossBreakdown at_zero = scdpo_loss(0.0, 0.0);
  bool scalar_ok = std::abs(at_zero.total - expected) < 1e-9 &&
                   std::abs(at_zero.total - 0.7931471805599453) < 1e-9;

  // and through the full pipeline with pi_theta == pi_ref
  auto library = std::make_shared<ToolLibrary>(default_library());
  Synthesizer synth(library, default_templates());
  BuildResult corpus = synth.build_dataset(60, 3);
  PicdOptions options;
  options.curriculum.epochs = 2;
  options.curriculum.eta_struct = 0.3;
  options.curriculum.eta_polish = 0.05;
  options.order = 2;
  options.extra_vocab = pair_tokens(corpus.pairs);
  PicdResult picd = train_picd(corpus.train, corpus.test, options);

  ScdpoPassStats stats =
      scdpo_eval(picd.policy, picd.policy, corpus.pairs, ScdpoConfig{});
  bool pipeline_ok = std::abs(stats.mean.total - expected) < 1e-9 &&
                     std::abs(stats.mean.r_plus) < 1e-12 &&
                     std::abs(stats.mean.r_minus) < 1e-12;

  std::ostringstream detail;
  detail.precision(15);
  detail << "scalar total = " << at_zero.total
         << ", pipeline mean total = " << stats.mean.total << " over "
         << corpus.pairs.size() << " pairs";
  report(3, "zero-initialization loss equals ln 2 + 10 * 0.01",
         scalar_ok && pipeline_ok, detail.str());
}

// ------------------------------------------------------------ criterion 4

// Independent scaffold renderer used as the golden reference: assembles
// the expected surface text and token stream with plain loops.
void golden_scaffold(const StructuredCot& cot, int b, const LatentVocab& vocab,
                     std::string* text, std::vector<std::string>* tokens) {
  *text = "<THOUGHT>";
  tokens->clear();
  tokens->push_back("<THOUGHT>");
  std::vector<std::string> latents;
  for (int i = 0; i < b; ++i)
    for (const std::string& tok : vocab.block_tokens(cot.blocks[i]))
      latents.push_back(tok);
  if (b > 0) {
    for (const std::string& tok : latents) {
      *text += " " + tok;
      tokens->push_back(tok);
    }
    *text += " ";
  }
  for (int i = b; i < cot.block_count(); ++i) {
    const CotBlock& block = cot.blocks[i];
    *text += block.open_tag() + block.text + block.close_tag();
    tokens->push_back(block.open_tag());
    std::istringstream words(block.text);
    std::string word;
    while (words >> word) tokens->push_back(word);
    tokens->push_back(block.close_tag());
  }
  *text += "</THOUGHT>";
  tokens->push_back("</THOUGHT>");
}

void criterion_4() {
  auto library = std::make_shared<ToolLibrary>(default_library());
  Synthesizer synth(library, default_templates());
  LatentVocab vocab(3, library->max_plan_length());

  int golden_bad = 0, validity_bad = 0, detection_bad = 0, cots = 0;
  for (std::uint64_t seed = 0; cots < 200; ++seed) {
    ContextBundle ctx = synth.generate_context(seed);
    auto [cot, plan] = synth.simulate_teacher(ctx, seed);
    ++cots;
    const int total = cot.block_count();
    const int n = static_cast<int>(plan.size());

    for (int b = 0; b <= total; ++b) {
      ScaffoldPrefix prefix = compress(cot, b, vocab);
      std::string expected_text;
      std::vector<std::string> expected_tokens;
      golden_scaffold(cot, b, vocab, &expected_text, &expected_tokens);
      if (prefix.text != expected_text || prefix.tokens != expected_tokens)
        ++golden_bad;
      if (b == 0 && prefix.text != render_cot(cot)) ++golden_bad;
    }

    ScaffoldPrefix full = compress(cot, total, vocab);
    if (!validate_latent_prefix(full.tokens, n, vocab).valid) ++validity_bad;

    // four planted corruption modes, each must be caught with its code
    {
      std::vector<std::string> t = full.tokens;
      t.push_back(kThoughtClose);  // duplicated wrapper
      if (validate_latent_prefix(t, n, vocab).code != DiagnosticCode::Wrapper)
        ++detection_bad;
    }
    {
      std::vector<std::string> t = full.tokens;
      std::swap(t[1], t[2]);  // first two latent tokens out of order
      if (validate_latent_prefix(t, n, vocab).code !=
          DiagnosticCode::OutOfOrder)
        ++detection_bad;
    }
    {
      std::vector<std::string> t = full.tokens;
      t.insert(t.end() - 1, "<STEP_1>");  // residual raw tag
      if (validate_latent_prefix(t, n, vocab).code !=
          DiagnosticCode::ResidualTag)
        ++detection_bad;
    }
    {
      std::vector<std::string> t = full.tokens;
      t.erase(t.end() - 4, t.end() - 1);  // drop the final step triplet
      if (validate_latent_prefix(t, n, vocab).code !=
          DiagnosticCode::StepCountMismatch)
        ++detection_bad;
    }
  }

  std::ostringstream detail;
  detail << cots << " CoTs, golden mismatches " << golden_bad
         << ", validity misses " << validity_bad << ", detection misses "
         << detection_bad;
  report(4, "scaffold compression is golden-exact and corruptions are caught",
         golden_bad == 0 && validity_bad == 0 && detection_bad == 0,
         detail.str());
}

// ------------------------------------------------------------ criterion 5

void criterion_5() {
  CurriculumConfig cfg;  // N=13, B*=9, 5e-6 / 1e-6, one block per epoch
  const long spe = 50;
  std::vector<ScheduleRow> rows = dump_schedule(cfg, spe);
  std::string csv = schedule_to_csv(rows);

  // re-parse the dump and compare to the closed form, exactly
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  const long t_star = 10 * spe;
  const long horizon = cfg.epochs * spe - t_star;
  int bad = 0;
  long parsed = 0;
  while (std::getline(in, line)) {
    long t, e, g;
    double lr;
    if (std::sscanf(line.c_str(), "%ld,%ld,%ld,%lf", &t, &e, &g, &lr) != 4) {
      ++bad;
      continue;
    }
    ++parsed;
    double expected;
    if (g <= cfg.b_star) {
      expected = 5e-6;
    } else {
      const double progress = static_cast<double>(t - t_star) /
                              static_cast<double>(horizon);
      expected = 1e-6 * 0.5 * (1.0 + std::cos(M_PI * progress));
    }
    if (lr != expected) ++bad;
  }
  std::ostringstream detail;
  detail << parsed << " rows, " << bad << " mismatches";
  report(5, "CALR schedule dump reproduces eta_struct then the cosine decay",
         parsed == 13 * spe && bad == 0, detail.str());
}

// ------------------------------------------------------------ criterion 6

void criterion_6() {
  SectionMask mask = {Section::Prompt, Section::Cot, Section::Cot,
                      Section::Cot, Section::Json, Section::Json};
  std::vector<double> losses = {9.9, 0.4, 1.0, 1.6, 0.2, 0.8};
  SectionLoss before = section_loss(losses, mask);

  const double cot_mean = 1.0;
  SectionMask padded_mask = mask;
  std::vector<double> padded = losses;
  for (int i = 0; i < 7; ++i) {
    padded_mask.push_back(Section::Cot);
    padded.push_back(cot_mean);
  }
  SectionLoss after = section_loss(padded, padded_mask);
  const double section_delta = std::abs(after.combined - before.combined);

  // plain token-mean cross entropy over the supervised tokens moves by a
  // computable amount on the same instance
  auto token_mean = [](const std::vector<double>& v, const SectionMask& m) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (m[i] == Section::Prompt) continue;
      sum += v[i];
      ++n;
    }
    return sum / static_cast<double>(n);
  };
  const double tm_before = token_mean(losses, mask);
  const double tm_after = token_mean(padded, padded_mask);
  // 5 supervised tokens averaging 0.8, plus 7 tokens at 1.0
  const double tm_expected = (0.8 * 5.0 + 7.0 * 1.0) / 12.0;

  std::ostringstream detail;
  detail.precision(15);
  detail << "section delta = " << section_delta
         << ", token-mean delta = " << std::abs(tm_after - tm_before);
  report(6, "section-normalized loss is invariant to mean-preserving padding",
         section_delta < 1e-12 && std::abs(tm_after - tm_expected) < 1e-12 &&
             std::abs(tm_after - tm_before) > 1e-3,
         detail.str());
}

// ------------------------------------------------------------ criterion 7

void criterion_7() {
  const double start = now_seconds();
  auto library = std::make_shared<ToolLibrary>(default_library());
  Synthesizer synth(library, default_templates());
  BuildResult corpus = synth.build_dataset(1000, 20260301, 0.3);

  std::vector<DatasetRecord> all = corpus.train;
  all.insert(all.end(), corpus.test.begin(), corpus.test.end());

  FilterReport first = filter_dataset(all, *library);
  std::size_t wrong_tier = 0, false_rejects = 0, missed = 0;
  for (const auto& [rec, verdict] : first.rejected) {
    if (rec.corrupt.is_null())
      ++false_rejects;
    else if (rec.corrupt.at("tier").get<std::string>() !=
             filter_tier_name(*verdict.tier))
      ++wrong_tier;
  }
  for (const DatasetRecord& rec : first.kept)
    if (!rec.corrupt.is_null()) ++missed;

  FilterReport second = filter_dataset(first.kept, *library);
  const double elapsed = now_seconds() - start;

  std::ostringstream detail;
  detail << corpus.corrupted << " planted, " << first.rejected.size()
         << " rejected, wrong-tier " << wrong_tier << ", false rejects "
         << false_rejects << ", missed " << missed << ", refilter removed "
         << second.rejected.size() << ", " << elapsed << " s";
  report(7, "filter catches each planted tier, no false rejects, idempotent",
         corpus.corrupted > 0 && wrong_tier == 0 && false_rejects == 0 &&
             missed == 0 && second.rejected.empty() && elapsed < 10.0,
         detail.str());
}

// ------------------------------------------------------------ criterion 8

void criterion_8() {
  auto library = std::make_shared<ToolLibrary>(default_library());
  Synthesizer synth(library, default_templates());

  int built = 0, mirror_bad = 0;
  std::uint64_t seed = 0;
  while (built < 1000) {
    ++seed;
    ContextBundle x = synth.generate_context(seed);
    ContextBundle x_prime;
    const ScenarioTemplate* base = synth.match_template(x);
    const ScenarioTemplate* other = nullptr;
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < 40 && !found; ++attempt) {
      std::set<StDimension> dims;
      std::mt19937_64 rng(seed * 100 + attempt);
      constexpr StDimension kDims[] = {StDimension::Time, StDimension::Location,
                                       StDimension::City, StDimension::Weekend,
                                       StDimension::Holiday};
      dims.insert(kDims[rng() % 5]);
      if (rng() % 2 == 0) dims.insert(kDims[rng() % 5]);
      x_prime = synth.perturb_context(x, dims, rng());
      other = synth.match_template(x_prime);
      if (other && other != base) found = true;
    }
    if (!found) continue;

    auto [cot1, y_x] = synth.simulate_teacher(x, 0);
    auto [cot2, y_xprime] = synth.simulate_teacher(x_prime, 0);
    (void)cot1;
    (void)cot2;
    if (y_x == y_xprime) continue;
    ++built;

    CounterfactualAnchor anchor{x, x_prime, y_x, y_xprime};
    CounterfactualAnchor swapped{x_prime, x, y_xprime, y_x};
    auto [f1, r1] = materialize_pairs(anchor);
    auto [f2, r2] = materialize_pairs(swapped);

    auto same = [](const PreferencePair& a, const PreferencePair& b) {
      return a.chosen == b.chosen && a.rejected == b.rejected &&
             context_to_json(a.prompt) == context_to_json(b.prompt);
    };
    if (!same(f1, r2) || !same(r1, f2)) ++mirror_bad;
  }

  std::ostringstream detail;
  detail << built << " anchors, " << mirror_bad << " mirror mismatches";
  report(8, "bidirectional pair materialization mirrors under role swap",
         built == 1000 && mirror_bad == 0, detail.str());
}

// ------------------------------------------------------ criteria 9 and 10

void criteria_9_and_10() {
  const double start = now_seconds();
  auto library = std::make_shared<ToolLibrary>(default_library());
  Synthesizer synth(library, default_templates());
  BuildResult corpus = synth.build_dataset(500, 42);

  PicdOptions calr;
  calr.curriculum.epochs = 13;
  calr.curriculum.blocks_per_epoch = 1;
  calr.curriculum.b_star = 9;
  calr.curriculum.eta_struct = 0.5;  // toy-scale eta pair, CALR shape
  calr.curriculum.eta_polish = 0.1;
  calr.schedule = LrSchedule::Calr;
  calr.order = 2;
  calr.seed = 7;
  calr.extra_vocab = pair_tokens(corpus.pairs);

  PicdResult calr_run = train_picd(corpus.train, corpus.test, calr);

  PicdOptions cosine = calr;
  cosine.schedule = LrSchedule::Cosine;
  PicdResult cosine_run = train_picd(corpus.train, corpus.test, cosine);

  const double elapsed = now_seconds() - start;
  const double calr_valid = calr_run.epochs.back().latent_valid.value_or(-1.0);
  const double cosine_valid =
      cosine_run.epochs.back().latent_valid.value_or(-1.0);

  std::ostringstream detail;
  detail << "CALR latent-valid " << calr_valid << ", cosine latent-valid "
         << cosine_valid << " (reported, not gated), " << corpus.train.size()
         << " train records, " << elapsed << " s";
  report(9, "toy PICD run reaches latent-valid >= 0.90 under CALR",
         calr_valid >= 0.90 && elapsed < 300.0, detail.str());

  // ---- criterion 10: SC-DPO on the PICD checkpoint
  ScdpoTrainOptions dpo;
  dpo.config = ScdpoConfig{};
  dpo.lr = 0.5;
  dpo.epochs = 1;
  dpo.seed = 11;
  ScdpoResult scdpo_run = train_scdpo(calr_run.policy, corpus.pairs, dpo);

  ScdpoTrainOptions vanilla = dpo;
  vanilla.config.lambda_a = 0.0;
  vanilla.config.lambda_gl = 0.0;
  vanilla.config.lambda_gh = 0.0;
  vanilla.config.lambda_c = 0.0;
  ScdpoResult vanilla_run = train_scdpo(calr_run.policy, corpus.pairs, vanilla);

  const bool gap_up = scdpo_run.after.mean_gap > scdpo_run.before.mean_gap;
  const bool anchor_held = scdpo_run.after.mean_chosen_shift >= -1e-3;
  const bool vanilla_drops_further = vanilla_run.after.mean_rejected_shift <
                                     scdpo_run.after.mean_rejected_shift;

  std::ostringstream detail10;
  detail10.precision(6);
  detail10 << "gap " << scdpo_run.before.mean_gap << " -> "
           << scdpo_run.after.mean_gap << ", chosen shift "
           << scdpo_run.after.mean_chosen_shift << ", rejected shift sc-dpo "
           << scdpo_run.after.mean_rejected_shift << " vs vanilla "
           << vanilla_run.after.mean_rejected_shift << ", "
           << corpus.pairs.size() << " pairs";
  report(10, "toy SC-DPO: gap widens, anchor holds, vanilla collapses further",
         gap_up && anchor_held && vanilla_drops_further, detail10.str());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criteria_9_and_10();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
