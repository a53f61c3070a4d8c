// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace gplan {

class UnknownToken : public std::runtime_error {
public:
  explicit UnknownToken(const std::string& token)
      : std::runtime_error("token not in vocabulary: " + token) {}
};

inline constexpr const char* kBosToken = "<BOS>";
inline constexpr const char* kEndToken = "<END>";

struct DecodeResult {
  std::vector<std::string> tokens;  // end token not included
  bool truncated = false;           // max_len hit before the end token
};

/// Autoregressive policy with an explicit logit table: one row of
/// next-token logits per conditioning context (the previous token for
/// order 1, the previous two for order 2). Unmaterialized rows are all
/// zero, i.e. uniform. Exact log-probabilities and closed-form gradients
/// make the training pipeline fully checkable.
class TabularPolicy {
public:
  explicit TabularPolicy(std::vector<std::string> vocab, int order = 1);

  int order() const { return order_; }
  int vocab_size() const { return static_cast<int>(vocab_.size()); }
  const std::vector<std::string>& vocab() const { return vocab_; }

  int token_index(const std::string& token) const;
  const std::string& token_at(int index) const { return vocab_.at(index); }
  bool has_token(const std::string& token) const {
    return index_.count(token) != 0;
  }

  /// Conditioning key for predicting stream[pos]; the stream must carry
  /// at least `order` tokens before pos.
  std::int64_t context_key(const std::vector<int>& stream,
                           std::size_t pos) const;

  /// Logits for a context; zeros when the row was never touched.
  std::vector<double> row_logits(std::int64_t key) const;
  std::vector<double>& mutable_row(std::int64_t key);
  const std::unordered_map<std::int64_t, std::vector<double>>& rows() const {
    return rows_;
  }

  static std::vector<double> softmax(const std::vector<double>& logits);
  static double log_softmax_at(const std::vector<double>& logits, int target);

  std::vector<int> to_indices(const std::vector<std::string>& tokens) const;

  /// Sum of per-token log-probabilities of `response` given `prompt`,
  /// conditioning on the prompt's trailing tokens at position 0.
  double logprob(const std::vector<std::string>& response,
                 const std::vector<std::string>& prompt) const;

  std::vector<double> per_token_logprobs(
      const std::vector<std::string>& response,
      const std::vector<std::string>& prompt) const;

  /// Argmax chain with lexicographic tie-break; stops at `stop_token`
  /// or after max_len generated tokens.
  DecodeResult greedy_decode(const std::vector<std::string>& prompt,
                             std::size_t max_len,
                             const std::string& stop_token = kEndToken) const;

  nlohmann::json to_json() const;
  static TabularPolicy from_json(const nlohmann::json& j);

  bool operator==(const TabularPolicy& other) const;

private:
  std::vector<int> padded_stream(const std::vector<std::string>& prompt,
                                 const std::vector<std::string>& response)
      const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  int order_;
  std::unordered_map<std::int64_t, std::vector<double>> rows_;
};

}  // namespace gplan
