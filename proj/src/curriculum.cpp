// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gplan {

void CurriculumConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (blocks_per_epoch < 0)
    throw std::invalid_argument("blocks_per_epoch must be >= 0");
  if (b_star < 1) throw std::invalid_argument("b_star must be >= 1");
  if (!(eta_struct > eta_polish) || !(eta_polish > 0.0))
    throw std::invalid_argument("need eta_struct > eta_polish > 0");
}

const char* section_name(Section s) {
  switch (s) {
    case Section::Prompt: return "PROMPT";
    case Section::Cot: return "COT";
    case Section::Json: return "JSON";
  }
  return "UNKNOWN";
}

Section section_from_name(const std::string& name) {
  if (name == "PROMPT") return Section::Prompt;
  if (name == "COT") return Section::Cot;
  if (name == "JSON") return Section::Json;
  throw std::invalid_argument("unknown section label: " + name);
}

int blocks_for_sample(int plan_len) {
  if (plan_len < 1) throw std::invalid_argument("plan length must be >= 1");
  return 2 + plan_len;
}

int stage_at_epoch(int epoch, const CurriculumConfig& cfg, int plan_len) {
  if (epoch < 0 || epoch >= cfg.epochs)
    throw std::invalid_argument("epoch out of range");
  return std::min(epoch * cfg.blocks_per_epoch, blocks_for_sample(plan_len));
}

CalrSchedule::CalrSchedule(CurriculumConfig cfg, long total_steps)
    : cfg_(cfg), total_steps_(total_steps) {
  cfg_.validate();
}

double CalrSchedule::lr_at_step(long t, int g) {
  if (t < 0) throw std::invalid_argument("step must be >= 0");
  if (g <= cfg_.b_star) return cfg_.eta_struct;
  if (!t_star_) {
    t_star_ = t;
    horizon_ = cfg_.total_polish_steps > 0 ? cfg_.total_polish_steps
                                           : total_steps_ - *t_star_;
    horizon_ = std::max<long>(horizon_, 1);
  }
  double progress = static_cast<double>(t - *t_star_) / horizon_;
  progress = std::clamp(progress, 0.0, 1.0);
  return cfg_.eta_polish * 0.5 * (1.0 + std::cos(M_PI * progress));
}

double cosine_lr(long t, long total_steps, double eta_max) {
  if (total_steps < 1) total_steps = 1;
  double progress =
      std::clamp(static_cast<double>(t) / total_steps, 0.0, 1.0);
  return eta_max * 0.5 * (1.0 + std::cos(M_PI * progress));
}

double constant_lr(double eta) { return eta; }

SectionLoss section_loss(const std::vector<double>& per_token_losses,
                         const SectionMask& mask) {
  if (per_token_losses.size() != mask.size())
    throw MaskMismatch(per_token_losses.size(), mask.size());
  double cot_sum = 0.0, json_sum = 0.0;
  std::size_t cot_n = 0, json_n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    switch (mask[i]) {
      case Section::Prompt: break;
      case Section::Cot:
        cot_sum += per_token_losses[i];
        ++cot_n;
        break;
      case Section::Json:
        json_sum += per_token_losses[i];
        ++json_n;
        break;
    }
  }
  if (json_n == 0) throw EmptyJson();
  SectionLoss out;
  out.cot = cot_n == 0 ? 0.0 : cot_sum / static_cast<double>(cot_n);
  out.json = json_sum / static_cast<double>(json_n);
  out.combined = 0.5 * (out.cot + out.json);
  return out;
}

std::vector<ScheduleRow> dump_schedule(const CurriculumConfig& cfg,
                                       long steps_per_epoch) {
  cfg.validate();
  if (steps_per_epoch < 1)
    throw std::invalid_argument("steps_per_epoch must be >= 1");
  CalrSchedule schedule(cfg, cfg.epochs * steps_per_epoch);
  std::vector<ScheduleRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.epochs * steps_per_epoch));
  long t = 0;
  for (int e = 0; e < cfg.epochs; ++e) {
    int g = e * cfg.blocks_per_epoch;
    for (long s = 0; s < steps_per_epoch; ++s, ++t)
      rows.push_back({t, e, g, schedule.lr_at_step(t, g)});
  }
  return rows;
}

std::string schedule_to_csv(const std::vector<ScheduleRow>& rows) {
  std::ostringstream out;
  out << "step,epoch,stage,lr\n";
  out.precision(17);
  for (const ScheduleRow& r : rows)
    out << r.step << "," << r.epoch << "," << r.stage << "," << r.lr << "\n";
  return out.str();
}

}  // namespace gplan
