// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <utility>

#include "gplan/plan.hpp"

namespace gplan {

class DegeneratePair : public std::runtime_error {
public:
  DegeneratePair()
      : std::runtime_error(
            "anchor plans are identical; nothing to prefer") {}
};

class NonFinite : public std::runtime_error {
public:
  explicit NonFinite(const std::string& where)
      : std::runtime_error("non-finite value in " + where) {}
};

/// A context pair differing only in spatiotemporal variables, each with
/// its matched plan.
struct CounterfactualAnchor {
  ContextBundle x;
  ContextBundle x_prime;
  Plan y_x;
  Plan y_xprime;

  void validate() const;
};

/// One direction of a counterfactual pair: under `prompt`, `chosen` is
/// the context-matched plan and `rejected` the mismatched one.
struct PreferencePair {
  ContextBundle prompt;
  Plan chosen;
  Plan rejected;
};

/// SC-DPO hyperparameters.
struct ScdpoConfig {
  double beta = 0.20;        // DPO temperature
  double delta = 0.0;        // anchor margin
  double gamma_low = 0.10;   // preference-gap lower bound
  double gamma_high = 0.20;  // preference-gap upper bound
  double m = 0.0;            // center target
  double lambda_a = 5.0;     // anchor weight
  double lambda_gl = 10.0;   // lower-gap weight
  double lambda_gh = 2.0;    // upper-gap weight
  double lambda_c = 3.0;     // center weight
  bool length_normalized = false;  // divide sequence log-probs by length

  void validate() const;
};

/// The loss surface evaluated at one (r_+, r_-) point.
struct LossBreakdown {
  double r_plus = 0.0;
  double r_minus = 0.0;
  double l_dpo = 0.0;
  double l_anchor = 0.0;
  double l_gap_low = 0.0;
  double l_gap_high = 0.0;
  double l_center = 0.0;
  double total = 0.0;
};

/// Builds both directions of an anchor: (x, y_x chosen, y_x' rejected)
/// and (x', y_x' chosen, y_x rejected). Throws DegeneratePair when the
/// two plans are equal.
std::pair<PreferencePair, PreferencePair> materialize_pairs(
    const CounterfactualAnchor& anchor);

/// r = beta * (log pi_theta(y|x) - log pi_ref(y|x)), with sequence-level
/// log-probabilities.
double reward_shift(double logp_policy, double logp_ref, double beta);

/// Preference, anchor, bounded-gap, and centered-drift terms:
///   l_dpo      = -log sigmoid(r_+ - r_-)
///   l_anchor   = max(0, delta - r_+)^2
///   l_gap_low  = max(0, gamma_low - gap)^2,  gap = r_+ - r_-
///   l_gap_high = max(0, gap - gamma_high)^2
///   l_center   = ((r_+ + r_-)/2 - m)^2
/// combined with the configured weights.
LossBreakdown scdpo_loss(double r_plus, double r_minus,
                         const ScdpoConfig& cfg = ScdpoConfig{});

/// Closed-form (d total / d r_+, d total / d r_-). Hinge kinks use the
/// zero subgradient (the boundary belongs to the inactive side).
std::pair<double, double> scdpo_grad(double r_plus, double r_minus,
                                     const ScdpoConfig& cfg = ScdpoConfig{});

}  // namespace gplan
