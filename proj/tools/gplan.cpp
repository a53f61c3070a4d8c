// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// gplan: synth -> filter -> compile -> train-picd -> train-dpo -> eval,
// plus the latent diagnostics and the LR schedule dump. Every artifact
// embeds the resolved config hash and seed; exit codes are 0 (success),
// 1 (validation failure), 2 (usage, config, or IO error).

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gplan/curriculum.hpp"
#include "gplan/dataset.hpp"
#include "gplan/filter.hpp"
#include "gplan/metrics.hpp"
#include "gplan/policy.hpp"
#include "gplan/scdpo.hpp"
#include "gplan/synth.hpp"
#include "gplan/trainer.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

std::uint64_t resolve_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("GPLAN_SEED")) {
    return std::stoull(env);
  }
  return flag_seed;
}

std::shared_ptr<const gplan::ToolLibrary> load_library(const std::string& path) {
  if (path.empty())
    return std::make_shared<gplan::ToolLibrary>(gplan::default_library());
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open library file " + path);
  json j;
  in >> j;
  return std::make_shared<gplan::ToolLibrary>(gplan::ToolLibrary::from_json(j));
}

std::vector<gplan::ScenarioTemplate> load_templates(const std::string& path) {
  if (path.empty()) return gplan::default_templates();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template file " + path);
  json j;
  in >> j;
  return gplan::templates_from_json(j);
}

void write_json_file(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

gplan::Provenance make_provenance(const json& resolved_config,
                                  std::uint64_t seed) {
  return gplan::Provenance{gplan::fnv1a_hex(resolved_config.dump()), seed};
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::size_t n = 1000;
  std::uint64_t seed = 7;
  double corrupt = 0.0;
  std::string out = "data";
  std::string library;
  std::string templates;
};

int run_synth(const SynthArgs& args) {
  const std::uint64_t seed = resolve_seed(args.seed);
  auto library = load_library(args.library);
  auto templates = load_templates(args.templates);
  gplan::Synthesizer synth(library, templates);

  json config{{"command", "synth"}, {"corrupt", args.corrupt},
              {"n", args.n},        {"seed", seed},
              {"library", args.library}, {"templates", args.templates}};
  gplan::Provenance prov = make_provenance(config, seed);

  gplan::BuildResult corpus = synth.build_dataset(args.n, seed, args.corrupt);
  fs::path out(args.out);
  gplan::write_dataset(out / "train.jsonl", corpus.train, prov);
  gplan::write_dataset(out / "test.jsonl", corpus.test, prov);
  std::vector<json> pair_lines;
  for (const gplan::PairRecord& pair : corpus.pairs)
    pair_lines.push_back(pair.to_json());
  gplan::write_jsonl(out / "pairs.jsonl", pair_lines, prov);
  write_json_file(out / "tools.json", library->to_json());
  write_json_file(out / "templates.json", gplan::templates_to_json(templates));

  json summary{{"config_hash", prov.config_hash},
               {"corrupted", corpus.corrupted},
               {"pairs", corpus.pairs.size()},
               {"seed", seed},
               {"test", corpus.test.size()},
               {"train", corpus.train.size()}};
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// --------------------------------------------------------------- filter

struct FilterArgs {
  std::string in;
  std::string out = "kept.jsonl";
  std::string rejects = "rejects.jsonl";
  std::string library;
  std::string report;
};

int run_filter(const FilterArgs& args) {
  auto library = load_library(args.library);
  std::vector<gplan::DatasetRecord> records =
      gplan::read_dataset(args.in, library);

  json config{{"command", "filter"}, {"in", args.in},
              {"library", args.library}};
  gplan::Provenance prov = make_provenance(config, 0);

  gplan::FilterReport report = gplan::filter_dataset(records, *library);
  gplan::write_dataset(args.out, report.kept, prov);

  std::vector<json> reject_lines;
  for (const auto& [rec, verdict] : report.rejected) {
    json line = gplan::record_to_json(rec);
    line["verdict"] = verdict.to_json();
    reject_lines.push_back(std::move(line));
  }
  gplan::write_jsonl(args.rejects, reject_lines, prov);

  json summary{{"config_hash", prov.config_hash},
               {"kept", report.kept.size()},
               {"rejected", report.rejected.size()},
               {"removal_rate", report.removal_rate},
               {"total", report.total()}};
  if (!args.report.empty()) write_json_file(args.report, summary);
  std::cout << summary.dump(2) << "\n";
  return report.rejected.empty() ? kExitOk : kExitValidation;
}

// -------------------------------------------------------------- compile

struct CompileArgs {
  std::string in;
  std::string out = "compiled.jsonl";
  std::string library;
  int stage = 0;
  int latent_k = 3;
};

int run_compile(const CompileArgs& args) {
  auto library = load_library(args.library);
  std::vector<gplan::DatasetRecord> records =
      gplan::read_dataset(args.in, library);
  gplan::LatentVocab vocab(args.latent_k, library->max_plan_length());

  json config{{"command", "compile"}, {"in", args.in},
              {"k", args.latent_k},   {"stage", args.stage}};
  gplan::Provenance prov = make_provenance(config, 0);

  std::vector<json> lines;
  for (const gplan::DatasetRecord& rec : records)
    lines.push_back(gplan::compile_record(rec, args.stage, vocab).to_json());
  gplan::write_jsonl(args.out, lines, prov);
  std::cout << json{{"compiled", lines.size()},
                    {"config_hash", prov.config_hash}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

// ------------------------------------------------------------ train-picd

struct TrainPicdArgs {
  std::string train;
  std::string test;
  std::string pairs;
  std::string library;
  std::string out = "run";
  std::string schedule = "calr";
  int epochs = 13;
  int blocks_per_epoch = 1;
  int b_star = 9;
  double eta_struct = 0.5;  // toy-scale default; the paper-scale value
  double eta_polish = 0.1;  // lives in CurriculumConfig and schedule-dump
  int order = 2;
  int latent_k = 3;
  std::uint64_t seed = 7;
  std::size_t max_decode_len = 96;
};

json epoch_report_json(const gplan::EpochReport& e) {
  json j{{"epoch", e.epoch},
         {"g", e.stage_g},
         {"lr_first", e.lr_first},
         {"lr_last", e.lr_last},
         {"mean_cot", e.mean_cot},
         {"mean_json", e.mean_json},
         {"mean_loss", e.mean_combined}};
  if (e.latent_valid)
    j["latent_valid"] = *e.latent_valid;
  else
    j["latent_valid"] = nullptr;
  return j;
}

int run_train_picd(const TrainPicdArgs& args) {
  const std::uint64_t seed = resolve_seed(args.seed);
  auto library = load_library(args.library);
  std::vector<gplan::DatasetRecord> train =
      gplan::read_dataset(args.train, library);
  std::vector<gplan::DatasetRecord> test =
      gplan::read_dataset(args.test, library);

  // minimum-validity gate before training
  gplan::FilterReport train_gate = gplan::filter_dataset(train, *library);
  gplan::FilterReport test_gate = gplan::filter_dataset(test, *library);

  gplan::PicdOptions options;
  options.curriculum.epochs = args.epochs;
  options.curriculum.blocks_per_epoch = args.blocks_per_epoch;
  options.curriculum.b_star = args.b_star;
  options.curriculum.eta_struct = args.eta_struct;
  options.curriculum.eta_polish = args.eta_polish;
  options.schedule = gplan::lr_schedule_from_name(args.schedule);
  options.order = args.order;
  options.latent_k = args.latent_k;
  options.seed = seed;
  options.max_decode_len = args.max_decode_len;
  if (!args.pairs.empty()) {
    gplan::JsonlFile pair_file = gplan::read_jsonl(args.pairs);
    std::vector<gplan::PairRecord> pairs;
    for (const json& line : pair_file.lines)
      pairs.push_back(gplan::PairRecord::from_json(line, library));
    options.extra_vocab = gplan::pair_tokens(pairs);
  }

  json config{{"b_star", args.b_star},
              {"blocks_per_epoch", args.blocks_per_epoch},
              {"command", "train-picd"},
              {"epochs", args.epochs},
              {"eta_polish", args.eta_polish},
              {"eta_struct", args.eta_struct},
              {"k", args.latent_k},
              {"order", args.order},
              {"schedule", args.schedule},
              {"seed", seed}};
  gplan::Provenance prov = make_provenance(config, seed);

  gplan::PicdResult result =
      gplan::train_picd(train_gate.kept, test_gate.kept, options);

  fs::path out(args.out);
  write_json_file(out / "checkpoint.json",
                  json{{"config", config},
                       {"config_hash", prov.config_hash},
                       {"policy", result.policy.to_json()},
                       {"seed", seed}});

  std::string csv = "# config_hash=" + prov.config_hash +
                    " seed=" + std::to_string(seed) + "\n";
  csv += "epoch,g,lr_first,lr_last,mean_cot,mean_json,mean_loss,latent_valid\n";
  for (const gplan::EpochReport& e : result.epochs) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  e.epoch, e.stage_g, e.lr_first, e.lr_last, e.mean_cot,
                  e.mean_json, e.mean_combined,
                  e.latent_valid ? *e.latent_valid : -1.0);
    csv += buf;
  }
  write_text_file(out / "picd_report.csv", csv);

  std::vector<json> decode_lines;
  for (const gplan::DecodeEval& decode : result.final_decodes) {
    json line{{"code", gplan::diagnostic_code_name(decode.diagnostic.code)},
              {"latent_valid", decode.diagnostic.valid},
              {"tokens", decode.tokens}};
    line["plan"] = decode.plan ? gplan::plan_to_json(*decode.plan)
                               : json(nullptr);
    decode_lines.push_back(std::move(line));
  }
  gplan::write_jsonl(out / "preds.jsonl", decode_lines, prov);

  json summary{{"config_hash", prov.config_hash},
               {"epochs", json::array()},
               {"filtered_out_train", train_gate.rejected.size()},
               {"filtered_out_test", test_gate.rejected.size()},
               {"seed", seed}};
  for (const gplan::EpochReport& e : result.epochs)
    summary["epochs"].push_back(epoch_report_json(e));
  write_json_file(out / "picd_summary.json", summary);
  std::cout << epoch_report_json(result.epochs.back()).dump(2) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- train-dpo

struct TrainDpoArgs {
  std::string pairs;
  std::string checkpoint;
  std::string library;
  std::string out = "run";
  double lr = 0.05;
  int epochs = 1;
  std::uint64_t seed = 7;
  gplan::ScdpoConfig config;
};

json pass_stats_json(const gplan::ScdpoPassStats& stats) {
  return json{{"l_anchor", stats.mean.l_anchor},
              {"l_center", stats.mean.l_center},
              {"l_dpo", stats.mean.l_dpo},
              {"l_gap_high", stats.mean.l_gap_high},
              {"l_gap_low", stats.mean.l_gap_low},
              {"mean_chosen_shift", stats.mean_chosen_shift},
              {"mean_gap", stats.mean_gap},
              {"mean_rejected_shift", stats.mean_rejected_shift},
              {"r_minus", stats.mean.r_minus},
              {"r_plus", stats.mean.r_plus},
              {"total", stats.mean.total}};
}

int run_train_dpo(const TrainDpoArgs& args) {
  const std::uint64_t seed = resolve_seed(args.seed);
  auto library = load_library(args.library);

  std::ifstream in(args.checkpoint);
  if (!in)
    throw std::runtime_error("cannot open checkpoint " + args.checkpoint);
  json checkpoint;
  in >> checkpoint;
  gplan::TabularPolicy policy =
      gplan::TabularPolicy::from_json(checkpoint.at("policy"));

  gplan::JsonlFile pair_file = gplan::read_jsonl(args.pairs);
  std::vector<gplan::PairRecord> pairs;
  for (const json& line : pair_file.lines)
    pairs.push_back(gplan::PairRecord::from_json(line, library));

  gplan::ScdpoTrainOptions options;
  options.config = args.config;
  options.lr = args.lr;
  options.epochs = args.epochs;
  options.seed = seed;

  json config{{"beta", args.config.beta},
              {"command", "train-dpo"},
              {"delta", args.config.delta},
              {"epochs", args.epochs},
              {"gamma_high", args.config.gamma_high},
              {"gamma_low", args.config.gamma_low},
              {"lambda_a", args.config.lambda_a},
              {"lambda_c", args.config.lambda_c},
              {"lambda_gh", args.config.lambda_gh},
              {"lambda_gl", args.config.lambda_gl},
              {"length_normalized", args.config.length_normalized},
              {"lr", args.lr},
              {"m", args.config.m},
              {"seed", seed}};
  gplan::Provenance prov = make_provenance(config, seed);

  gplan::ScdpoResult result = gplan::train_scdpo(policy, pairs, options);

  fs::path out(args.out);
  write_json_file(out / "checkpoint_dpo.json",
                  json{{"config", config},
                       {"config_hash", prov.config_hash},
                       {"policy", result.policy.to_json()},
                       {"seed", seed}});
  json report{{"after", pass_stats_json(result.after)},
              {"before", pass_stats_json(result.before)},
              {"config_hash", prov.config_hash},
              {"pairs", pairs.size()},
              {"seed", seed}};
  write_json_file(out / "dpo_report.json", report);
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string library;
  std::string report = "report.json";
  bool strict = false;
  int k = 3;
};

int run_eval(const EvalArgs& args) {
  auto library = load_library(args.library);
  gplan::JsonlFile preds = gplan::read_jsonl(args.pred);
  std::vector<gplan::DatasetRecord> truth =
      gplan::read_dataset(args.truth, library);
  if (preds.lines.size() != truth.size())
    throw std::runtime_error("prediction and truth line counts differ");

  json config{{"command", "eval"},   {"k", args.k},
              {"pred", args.pred},   {"strict", args.strict},
              {"truth", args.truth}};
  gplan::Provenance prov = make_provenance(config, 0);

  gplan::EditCosts costs;
  double acc = 0.0, ndcg = 0.0, nes_sum = 0.0;
  std::size_t valid_count = 0, with_diag = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    gplan::Plan truth_plan =
        gplan::plan_from_json(truth[i].plan, *library);
    gplan::Plan pred_plan;  // empty when the prediction is null
    const json& line = preds.lines[i];
    if (line.contains("plan") && !line["plan"].is_null())
      pred_plan = gplan::plan_from_json(line["plan"], *library);
    acc += gplan::acc_at_1(pred_plan, truth_plan, args.strict);
    ndcg += gplan::ndcg_at_k(pred_plan, truth_plan, args.k);
    nes_sum += gplan::nes(pred_plan, truth_plan, costs);
    if (line.contains("latent_valid")) {
      ++with_diag;
      if (line["latent_valid"].get<bool>()) ++valid_count;
    }
  }
  const double n = static_cast<double>(truth.size());
  json report{{"acc1", acc / n},
              {"config_hash", prov.config_hash},
              {"judge",
               {{"flow", nullptr},
                {"logic", nullptr},
                {"overall", nullptr},
                {"st", nullptr}}},
              {"n", truth.size()},
              {"ndcg3", ndcg / n},
              {"nes_mean", nes_sum / n}};
  report["latent_valid"] =
      with_diag == 0 ? json(nullptr)
                     : json(static_cast<double>(valid_count) /
                            static_cast<double>(with_diag));
  write_json_file(args.report, report);
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- diagnose

struct DiagnoseArgs {
  std::string in;
  std::string library;
  std::string report = "diagnostics.json";
  std::string verdicts;
  int latent_k = 3;
};

int run_diagnose(const DiagnoseArgs& args) {
  auto library = load_library(args.library);
  gplan::LatentVocab vocab(args.latent_k, library->max_plan_length());
  gplan::JsonlFile file = gplan::read_jsonl(args.in);

  json config{{"command", "diagnose"}, {"in", args.in}, {"k", args.latent_k}};
  gplan::Provenance prov = make_provenance(config, 0);

  std::vector<gplan::DiagnosticResult> diagnostics;
  std::vector<json> verdict_lines;
  std::map<std::string, int> code_counts;
  for (const json& line : file.lines) {
    std::vector<std::string> tokens =
        line.at("tokens").get<std::vector<std::string>>();
    gplan::DiagnosticResult diag;
    if (line.contains("plan_len"))
      diag = gplan::validate_latent_prefix(tokens, line["plan_len"].get<int>(),
                                           vocab);
    else
      diag = gplan::evaluate_decode(tokens, vocab, *library).diagnostic;
    ++code_counts[gplan::diagnostic_code_name(diag.code)];
    verdict_lines.push_back(json{
        {"code", gplan::diagnostic_code_name(diag.code)},
        {"detail", diag.detail},
        {"valid", diag.valid}});
    diagnostics.push_back(std::move(diag));
  }
  if (!args.verdicts.empty())
    gplan::write_jsonl(args.verdicts, verdict_lines, prov);

  std::optional<double> rate = gplan::latent_valid_rate(diagnostics);
  json report{{"codes", code_counts},
              {"config_hash", prov.config_hash},
              {"n", diagnostics.size()}};
  report["latent_valid"] = rate ? json(*rate) : json(nullptr);
  write_json_file(args.report, report);
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

// --------------------------------------------------------- schedule-dump

struct ScheduleArgs {
  int epochs = 13;
  long steps_per_epoch = 50;
  int blocks_per_epoch = 1;
  int b_star = 9;
  double eta_struct = 5e-6;
  double eta_polish = 1e-6;
  std::string out = "schedule.csv";
};

int run_schedule_dump(const ScheduleArgs& args) {
  gplan::CurriculumConfig cfg;
  cfg.epochs = args.epochs;
  cfg.blocks_per_epoch = args.blocks_per_epoch;
  cfg.b_star = args.b_star;
  cfg.eta_struct = args.eta_struct;
  cfg.eta_polish = args.eta_polish;

  json config{{"b_star", args.b_star},
              {"blocks_per_epoch", args.blocks_per_epoch},
              {"command", "schedule-dump"},
              {"epochs", args.epochs},
              {"eta_polish", args.eta_polish},
              {"eta_struct", args.eta_struct},
              {"steps_per_epoch", args.steps_per_epoch}};
  gplan::Provenance prov = make_provenance(config, 0);

  std::vector<gplan::ScheduleRow> rows =
      gplan::dump_schedule(cfg, args.steps_per_epoch);
  std::string csv = "# config_hash=" + prov.config_hash + "\n";
  csv += gplan::schedule_to_csv(rows);
  write_text_file(args.out, csv);
  std::cout << json{{"config_hash", prov.config_hash}, {"rows", rows.size()}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gplan: desk-scale PICD + SC-DPO training pipeline"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "Synthesize a corpus");
  synth->add_option("--n", synth_args.n, "Number of samples")->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "RNG seed")->capture_default_str();
  synth->add_option("--corrupt", synth_args.corrupt,
                    "Probability of planting a violation per record");
  synth->add_option("--out", synth_args.out, "Output directory")->capture_default_str();
  synth->add_option("--library", synth_args.library, "Tool library JSON");
  synth->add_option("--templates", synth_args.templates, "Template JSON");

  FilterArgs filter_args;
  CLI::App* filter = app.add_subcommand("filter", "Three-tier validity filter");
  filter->add_option("--in", filter_args.in, "Input JSONL")->required();
  filter->add_option("--out", filter_args.out, "Kept records")->capture_default_str();
  filter->add_option("--rejects", filter_args.rejects, "Rejected records")
      ->capture_default_str();
  filter->add_option("--library", filter_args.library, "Tool library JSON");
  filter->add_option("--report", filter_args.report, "Summary JSON path");

  CompileArgs compile_args;
  CLI::App* compile = app.add_subcommand("compile", "Compile curriculum records");
  compile->add_option("--in", compile_args.in, "Input JSONL")->required();
  compile->add_option("--out", compile_args.out, "Output JSONL")->capture_default_str();
  compile->add_option("--library", compile_args.library, "Tool library JSON");
  compile->add_option("--stage", compile_args.stage,
                      "Leading blocks to compress (clamped per sample)")
      ->capture_default_str();
  compile->add_option("--k", compile_args.latent_k, "Latent tokens per block")
      ->capture_default_str();

  TrainPicdArgs picd_args;
  CLI::App* picd = app.add_subcommand("train-picd", "Progressive distillation");
  picd->add_option("--train", picd_args.train, "Training JSONL")->required();
  picd->add_option("--test", picd_args.test, "Held-out JSONL")->required();
  picd->add_option("--pairs", picd_args.pairs,
                   "Pair corpus whose tokens join the vocabulary");
  picd->add_option("--library", picd_args.library, "Tool library JSON");
  picd->add_option("--out", picd_args.out, "Output directory")->capture_default_str();
  picd->add_option("--schedule", picd_args.schedule, "calr|cosine|constant")
      ->capture_default_str();
  picd->add_option("--epochs", picd_args.epochs, "Epochs")->capture_default_str();
  picd->add_option("--blocks-per-epoch", picd_args.blocks_per_epoch,
                   "Stage increment per epoch")
      ->capture_default_str();
  picd->add_option("--b-star", picd_args.b_star, "LR transition target")
      ->capture_default_str();
  picd->add_option("--eta-struct", picd_args.eta_struct,
                   "Structure-phase LR (toy scale)")
      ->capture_default_str();
  picd->add_option("--eta-polish", picd_args.eta_polish,
                   "Polish-phase LR (toy scale)")
      ->capture_default_str();
  picd->add_option("--order", picd_args.order, "Conditioning order (1 or 2)")
      ->capture_default_str();
  picd->add_option("--k", picd_args.latent_k, "Latent tokens per block")
      ->capture_default_str();
  picd->add_option("--seed", picd_args.seed, "RNG seed")->capture_default_str();
  picd->add_option("--max-decode-len", picd_args.max_decode_len,
                   "Greedy decode budget")
      ->capture_default_str();

  TrainDpoArgs dpo_args;
  CLI::App* dpo = app.add_subcommand("train-dpo", "Counterfactual preference step");
  dpo->add_option("--pairs", dpo_args.pairs, "Pair corpus JSONL")->required();
  dpo->add_option("--checkpoint", dpo_args.checkpoint, "Input checkpoint")
      ->required();
  dpo->add_option("--library", dpo_args.library, "Tool library JSON");
  dpo->add_option("--out", dpo_args.out, "Output directory")->capture_default_str();
  dpo->add_option("--lr", dpo_args.lr, "Learning rate (toy scale)")
      ->capture_default_str();
  dpo->add_option("--epochs", dpo_args.epochs, "Epochs")->capture_default_str();
  dpo->add_option("--seed", dpo_args.seed, "RNG seed")->capture_default_str();
  dpo->add_option("--beta", dpo_args.config.beta, "DPO temperature")
      ->capture_default_str();
  dpo->add_option("--delta", dpo_args.config.delta, "Anchor margin")
      ->capture_default_str();
  dpo->add_option("--gamma-low", dpo_args.config.gamma_low, "Gap lower bound")
      ->capture_default_str();
  dpo->add_option("--gamma-high", dpo_args.config.gamma_high, "Gap upper bound")
      ->capture_default_str();
  dpo->add_option("--center", dpo_args.config.m, "Center target")
      ->capture_default_str();
  dpo->add_option("--lambda-a", dpo_args.config.lambda_a, "Anchor weight")
      ->capture_default_str();
  dpo->add_option("--lambda-gl", dpo_args.config.lambda_gl, "Low-gap weight")
      ->capture_default_str();
  dpo->add_option("--lambda-gh", dpo_args.config.lambda_gh, "High-gap weight")
      ->capture_default_str();
  dpo->add_option("--lambda-c", dpo_args.config.lambda_c, "Center weight")
      ->capture_default_str();
  dpo->add_flag("--length-normalized", dpo_args.config.length_normalized,
                "Normalize sequence log-probs by length");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Offline metrics");
  eval->add_option("--pred", eval_args.pred, "Predictions JSONL")->required();
  eval->add_option("--truth", eval_args.truth, "Reference JSONL")->required();
  eval->add_option("--library", eval_args.library, "Tool library JSON");
  eval->add_option("--report", eval_args.report, "Report JSON path")
      ->capture_default_str();
  eval->add_flag("--strict", eval_args.strict,
                 "Require parameter equality for Acc@1");
  eval->add_option("--k", eval_args.k, "NDCG cutoff")->capture_default_str();

  DiagnoseArgs diag_args;
  CLI::App* diagnose = app.add_subcommand("diagnose", "Latent-structure validity");
  diagnose->add_option("--in", diag_args.in, "Decodes JSONL")->required();
  diagnose->add_option("--library", diag_args.library, "Tool library JSON");
  diagnose->add_option("--report", diag_args.report, "Report JSON path")
      ->capture_default_str();
  diagnose->add_option("--verdicts", diag_args.verdicts,
                       "Optional per-record verdict JSONL");
  diagnose->add_option("--k", diag_args.latent_k, "Latent tokens per block")
      ->capture_default_str();

  ScheduleArgs schedule_args;
  CLI::App* schedule = app.add_subcommand("schedule-dump", "CALR table as CSV");
  schedule->add_option("--epochs", schedule_args.epochs, "Epochs")
      ->capture_default_str();
  schedule->add_option("--steps-per-epoch", schedule_args.steps_per_epoch,
                       "Steps per epoch")
      ->capture_default_str();
  schedule->add_option("--blocks-per-epoch", schedule_args.blocks_per_epoch,
                       "Stage increment per epoch")
      ->capture_default_str();
  schedule->add_option("--b-star", schedule_args.b_star, "LR transition target")
      ->capture_default_str();
  schedule->add_option("--eta-struct", schedule_args.eta_struct,
                       "Structure-phase LR")
      ->capture_default_str();
  schedule->add_option("--eta-polish", schedule_args.eta_polish,
                       "Polish-phase LR")
      ->capture_default_str();
  schedule->add_option("--out", schedule_args.out, "CSV path")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (filter->parsed()) return run_filter(filter_args);
    if (compile->parsed()) return run_compile(compile_args);
    if (picd->parsed()) return run_train_picd(picd_args);
    if (dpo->parsed()) return run_train_dpo(dpo_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (diagnose->parsed()) return run_diagnose(diag_args);
    if (schedule->parsed()) return run_schedule_dump(schedule_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
