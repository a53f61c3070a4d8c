// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace gplan {

void EditCosts::validate() const {
  if (insert <= 0.0 || del <= 0.0 || tool_substitution <= 0.0 ||
      param_substitution <= 0.0)
    throw std::invalid_argument("edit costs must be positive");
  if (param_substitution > tool_substitution)
    throw std::invalid_argument(
        "param substitution must not cost more than tool substitution");
}

double intent_substitution_cost(const Intent& a, const Intent& b,
                                const EditCosts& costs) {
  if (a.tool != b.tool) return costs.tool_substitution;
  return a.params == b.params ? 0.0 : costs.param_substitution;
}

double plan_edit_distance(const Plan& pred, const Plan& truth,
                          const EditCosts& costs) {
  costs.validate();
  const std::size_t m = pred.size();
  const std::size_t n = truth.size();
  // dp[i][j] = distance between pred[0..i) and truth[0..j)
  std::vector<std::vector<double>> dp(m + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 1; i <= m; ++i) dp[i][0] = dp[i - 1][0] + costs.del;
  for (std::size_t j = 1; j <= n; ++j) dp[0][j] = dp[0][j - 1] + costs.insert;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      double sub = dp[i - 1][j - 1] + intent_substitution_cost(
                                          pred.intents[i - 1],
                                          truth.intents[j - 1], costs);
      double del = dp[i - 1][j] + costs.del;
      double ins = dp[i][j - 1] + costs.insert;
      dp[i][j] = std::min({sub, del, ins});
    }
  }
  return dp[m][n];
}

double nes(const Plan& pred, const Plan& truth, const EditCosts& costs) {
  if (truth.empty())
    throw std::invalid_argument("reference plan must be nonempty");
  const double denom =
      static_cast<double>(std::max(pred.size(), truth.size()));
  return 1.0 - plan_edit_distance(pred, truth, costs) / denom;
}

int acc_at_1(const Plan& pred, const Plan& truth, bool strict) {
  if (truth.empty())
    throw std::invalid_argument("reference plan must be nonempty");
  if (pred.empty()) return 0;
  const Intent& p = pred.intents.front();
  const Intent& t = truth.intents.front();
  if (p.tool != t.tool) return 0;
  return (!strict || p.params == t.params) ? 1 : 0;
}

double ndcg_at_k(const Plan& pred, const Plan& truth, int k) {
  if (truth.empty())
    throw std::invalid_argument("reference plan must be nonempty");
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  std::map<std::string, int> available;
  for (const Intent& intent : truth.intents) ++available[intent.tool];

  std::vector<int> rel;
  rel.reserve(pred.size());
  for (const Intent& intent : pred.intents) {
    auto it = available.find(intent.tool);
    if (it != available.end() && it->second > 0) {
      --it->second;
      rel.push_back(1);
    } else {
      rel.push_back(0);
    }
  }

  auto dcg = [k](const std::vector<int>& rels) {
    double sum = 0.0;
    const int limit = std::min<int>(k, static_cast<int>(rels.size()));
    for (int i = 0; i < limit; ++i)
      sum += rels[i] / std::log2(static_cast<double>(i) + 2.0);
    return sum;
  };

  const double actual = dcg(rel);
  std::vector<int> ideal = rel;
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  const double best = dcg(ideal);
  return best > 0.0 ? actual / best : 0.0;
}

std::optional<double> latent_valid_rate(
    const std::vector<DiagnosticResult>& diagnostics) {
  if (diagnostics.empty()) return std::nullopt;
  std::size_t valid = 0;
  for (const DiagnosticResult& d : diagnostics)
    if (d.valid) ++valid;
  return static_cast<double>(valid) / static_cast<double>(diagnostics.size());
}

}  // namespace gplan
