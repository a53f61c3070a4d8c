// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gplan {

class MaskMismatch : public std::runtime_error {
public:
  MaskMismatch(std::size_t losses, std::size_t mask)
      : std::runtime_error("mask length " + std::to_string(mask) +
                           " does not match " + std::to_string(losses) +
                           " losses") {}
};

class EmptyJson : public std::runtime_error {
public:
  EmptyJson() : std::runtime_error("section mask has no JSON tokens") {}
};

/// Progressive-compression and learning-rate settings.
struct CurriculumConfig {
  int epochs = 13;
  int blocks_per_epoch = 1;
  int b_star = 9;              // LR-transition target (p90 of B)
  double eta_struct = 5e-6;    // structure-acquisition LR
  double eta_polish = 1e-6;    // semantic-polish LR (cosine-decayed)
  long total_polish_steps = 0; // 0 = derive from the run horizon at crossing

  void validate() const;
};

enum class Section { Prompt, Cot, Json };

using SectionMask = std::vector<Section>;

const char* section_name(Section s);
Section section_from_name(const std::string& name);

/// B = 2 + n: CONTEXT, STRATEGY, and one block per intent.
int blocks_for_sample(int plan_len);

/// Leading blocks compressed at epoch e, clamped per sample so short
/// plans go fully implicit earlier.
int stage_at_epoch(int epoch, const CurriculumConfig& cfg, int plan_len);

/// Compression-aware learning rate. Constant eta_struct while the global
/// stage g is at most B*, then a cosine decay from eta_polish that starts
/// at the first step after the crossing and reaches zero at the horizon.
/// The crossing step t* is recorded exactly once.
class CalrSchedule {
public:
  CalrSchedule(CurriculumConfig cfg, long total_steps);

  double lr_at_step(long t, int g);

  std::optional<long> crossing_step() const { return t_star_; }
  long polish_horizon() const { return horizon_; }

private:
  CurriculumConfig cfg_;
  long total_steps_;
  std::optional<long> t_star_;
  long horizon_ = 0;
};

/// Single-phase baselines used in the schedule ablation.
double cosine_lr(long t, long total_steps, double eta_max);
double constant_lr(double eta);

struct SectionLoss {
  double cot = 0.0;
  double json = 0.0;
  double combined = 0.0;
};

/// Mean loss per active section, combined with equal section weights:
/// L = (L_cot + L_json) / 2. PROMPT tokens are excluded; an empty CoT
/// section contributes zero.
SectionLoss section_loss(const std::vector<double>& per_token_losses,
                         const SectionMask& mask);

struct ScheduleRow {
  long step;
  int epoch;
  int stage;
  double lr;
};

/// The (t, e, g, eta) table for a full run, for CSV dumps and golden
/// comparisons.
std::vector<ScheduleRow> dump_schedule(const CurriculumConfig& cfg,
                                       long steps_per_epoch);

std::string schedule_to_csv(const std::vector<ScheduleRow>& rows);

}  // namespace gplan
