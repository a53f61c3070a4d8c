// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/scdpo.hpp"

#include <cmath>

namespace gplan {

void CounterfactualAnchor::validate() const {
  if (!x.same_user_and_history(x_prime))
    throw std::invalid_argument("anchor contexts must share user and history");
  if (x.st == x_prime.st)
    throw std::invalid_argument(
        "anchor contexts must differ in at least one spatiotemporal variable");
}

void ScdpoConfig::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (gamma_low > gamma_high)
    throw std::invalid_argument("gamma_low must be <= gamma_high");
  if (lambda_a < 0.0 || lambda_gl < 0.0 || lambda_gh < 0.0 || lambda_c < 0.0)
    throw std::invalid_argument("lambda weights must be >= 0");
}

std::pair<PreferencePair, PreferencePair> materialize_pairs(
    const CounterfactualAnchor& anchor) {
  anchor.validate();
  if (anchor.y_x == anchor.y_xprime) throw DegeneratePair();
  PreferencePair forward{anchor.x, anchor.y_x, anchor.y_xprime};
  PreferencePair reverse{anchor.x_prime, anchor.y_xprime, anchor.y_x};
  return {std::move(forward), std::move(reverse)};
}

namespace {

void require_finite(double v, const char* where) {
  if (!std::isfinite(v)) throw NonFinite(where);
}

// -log sigmoid(x) = softplus(-x), computed without overflow.
double neg_log_sigmoid(double x) {
  return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

double hinge(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

double reward_shift(double logp_policy, double logp_ref, double beta) {
  require_finite(logp_policy, "reward_shift logp_policy");
  require_finite(logp_ref, "reward_shift logp_ref");
  return beta * (logp_policy - logp_ref);
}

LossBreakdown scdpo_loss(double r_plus, double r_minus,
                         const ScdpoConfig& cfg) {
  require_finite(r_plus, "scdpo_loss r_plus");
  require_finite(r_minus, "scdpo_loss r_minus");
  cfg.validate();

  LossBreakdown out;
  out.r_plus = r_plus;
  out.r_minus = r_minus;
  const double gap = r_plus - r_minus;
  const double center = 0.5 * (r_plus + r_minus);

  out.l_dpo = neg_log_sigmoid(gap);
  const double anchor_slack = hinge(cfg.delta - r_plus);
  out.l_anchor = anchor_slack * anchor_slack;
  const double low_slack = hinge(cfg.gamma_low - gap);
  out.l_gap_low = low_slack * low_slack;
  const double high_slack = hinge(gap - cfg.gamma_high);
  out.l_gap_high = high_slack * high_slack;
  const double drift = center - cfg.m;
  out.l_center = drift * drift;

  out.total = out.l_dpo + cfg.lambda_a * out.l_anchor +
              cfg.lambda_gl * out.l_gap_low + cfg.lambda_gh * out.l_gap_high +
              cfg.lambda_c * out.l_center;
  return out;
}

std::pair<double, double> scdpo_grad(double r_plus, double r_minus,
                                     const ScdpoConfig& cfg) {
  require_finite(r_plus, "scdpo_grad r_plus");
  require_finite(r_minus, "scdpo_grad r_minus");
  cfg.validate();

  const double gap = r_plus - r_minus;
  const double center = 0.5 * (r_plus + r_minus);

  // d l_dpo / d gap = sigmoid(gap) - 1
  const double d_dpo_d_gap = sigmoid(gap) - 1.0;

  const double anchor_slack = hinge(cfg.delta - r_plus);
  const double d_anchor_d_rplus = -2.0 * anchor_slack;

  const double low_slack = hinge(cfg.gamma_low - gap);
  const double d_low_d_gap = -2.0 * low_slack;
  const double high_slack = hinge(gap - cfg.gamma_high);
  const double d_high_d_gap = 2.0 * high_slack;

  // gap = r_+ - r_-, so gap-coupled terms enter the two partials with
  // opposite signs; the center term enters both with d center / d r = 1/2.
  const double d_gap_terms =
      d_dpo_d_gap + cfg.lambda_gl * d_low_d_gap + cfg.lambda_gh * d_high_d_gap;
  const double d_center_term = cfg.lambda_c * (center - cfg.m);

  const double d_rplus =
      d_gap_terms + cfg.lambda_a * d_anchor_d_rplus + d_center_term;
  const double d_rminus = -d_gap_terms + d_center_term;
  return {d_rplus, d_rminus};
}

}  // namespace gplan
