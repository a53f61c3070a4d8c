// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "gplan/cot.hpp"
#include "gplan/plan.hpp"

namespace gplan {

/// Weighted edit costs. A parameter-level substitution (same tool,
/// different parameters) counts once per intent, regardless of how many
/// keys differ.
struct EditCosts {
  double insert = 1.0;
  double del = 1.0;
  double tool_substitution = 1.0;
  double param_substitution = 0.3;

  void validate() const;
};

/// Cost of aligning one predicted intent against one reference intent.
double intent_substitution_cost(const Intent& a, const Intent& b,
                                const EditCosts& costs);

/// Weighted Levenshtein distance between intent sequences.
double plan_edit_distance(const Plan& pred, const Plan& truth,
                          const EditCosts& costs);

/// Normalized edit similarity: 1 - D / max(|pred|, |truth|). The
/// prediction may be empty; the reference must not be.
double nes(const Plan& pred, const Plan& truth,
           const EditCosts& costs = EditCosts{});

/// First-intent accuracy. Tool-level match by default; strict mode also
/// requires parameter equality.
int acc_at_1(const Plan& pred, const Plan& truth, bool strict = false);

/// Binary-relevance NDCG. A predicted intent is relevant when its tool is
/// still available in the reference tool multiset, consumed greedily
/// front to back; the ideal ranking sorts the realized relevances.
double ndcg_at_k(const Plan& pred, const Plan& truth, int k = 3);

/// Fraction of valid diagnostics; empty input is undefined, not zero.
std::optional<double> latent_valid_rate(
    const std::vector<DiagnosticResult>& diagnostics);

}  // namespace gplan
