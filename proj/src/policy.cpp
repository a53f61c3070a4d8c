// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/policy.hpp"

#include <algorithm>
#include <cmath>

using nlohmann::json;

namespace gplan {

TabularPolicy::TabularPolicy(std::vector<std::string> vocab, int order)
    : vocab_(std::move(vocab)), order_(order) {
  if (order_ != 1 && order_ != 2)
    throw std::invalid_argument("conditioning order must be 1 or 2");
  if (std::find(vocab_.begin(), vocab_.end(), kBosToken) == vocab_.end())
    vocab_.push_back(kBosToken);
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], static_cast<int>(i)).second)
      throw std::invalid_argument("duplicate vocab token: " + vocab_[i]);
  }
}

int TabularPolicy::token_index(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw UnknownToken(token);
  return it->second;
}

std::int64_t TabularPolicy::context_key(const std::vector<int>& stream,
                                        std::size_t pos) const {
  if (pos < static_cast<std::size_t>(order_))
    throw std::invalid_argument("stream not padded for conditioning order");
  const std::int64_t prev1 = stream[pos - 1];
  if (order_ == 1) return prev1;
  const std::int64_t prev2 = stream[pos - 2];
  return prev2 * vocab_size() + prev1;
}

std::vector<double> TabularPolicy::row_logits(std::int64_t key) const {
  auto it = rows_.find(key);
  if (it != rows_.end()) return it->second;
  return std::vector<double>(vocab_.size(), 0.0);
}

std::vector<double>& TabularPolicy::mutable_row(std::int64_t key) {
  auto [it, inserted] = rows_.try_emplace(key);
  if (inserted) it->second.assign(vocab_.size(), 0.0);
  return it->second;
}

std::vector<double> TabularPolicy::softmax(const std::vector<double>& logits) {
  const double max = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double TabularPolicy::log_softmax_at(const std::vector<double>& logits,
                                     int target) {
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - max);
  return logits[target] - max - std::log(sum);
}

std::vector<int> TabularPolicy::to_indices(
    const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(token_index(t));
  return out;
}

std::vector<int> TabularPolicy::padded_stream(
    const std::vector<std::string>& prompt,
    const std::vector<std::string>& response) const {
  std::vector<int> stream;
  stream.reserve(prompt.size() + response.size() + 2);
  const int bos = token_index(kBosToken);
  stream.push_back(bos);
  stream.push_back(bos);
  for (const std::string& t : prompt) stream.push_back(token_index(t));
  for (const std::string& t : response) stream.push_back(token_index(t));
  return stream;
}

std::vector<double> TabularPolicy::per_token_logprobs(
    const std::vector<std::string>& response,
    const std::vector<std::string>& prompt) const {
  std::vector<int> stream = padded_stream(prompt, response);
  const std::size_t start = 2 + prompt.size();
  std::vector<double> out;
  out.reserve(response.size());
  for (std::size_t pos = start; pos < stream.size(); ++pos) {
    std::vector<double> logits = row_logits(context_key(stream, pos));
    out.push_back(log_softmax_at(logits, stream[pos]));
  }
  return out;
}

double TabularPolicy::logprob(const std::vector<std::string>& response,
                              const std::vector<std::string>& prompt) const {
  double sum = 0.0;
  for (double lp : per_token_logprobs(response, prompt)) sum += lp;
  return sum;
}

DecodeResult TabularPolicy::greedy_decode(
    const std::vector<std::string>& prompt, std::size_t max_len,
    const std::string& stop_token) const {
  std::vector<int> stream = padded_stream(prompt, {});
  const int stop = token_index(stop_token);

  DecodeResult result;
  for (std::size_t n = 0; n < max_len; ++n) {
    std::vector<double> logits = row_logits(context_key(stream, stream.size()));
    int best = 0;
    for (int i = 1; i < vocab_size(); ++i) {
      if (logits[i] > logits[best] ||
          (logits[i] == logits[best] && vocab_[i] < vocab_[best]))
        best = i;
    }
    if (best == stop) return result;
    result.tokens.push_back(vocab_[best]);
    stream.push_back(best);
  }
  result.truncated = true;
  return result;
}

json TabularPolicy::to_json() const {
  std::vector<std::int64_t> keys;
  keys.reserve(rows_.size());
  for (const auto& [key, row] : rows_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  json rows = json::object();
  for (std::int64_t key : keys) rows[std::to_string(key)] = rows_.at(key);
  return json{{"order", order_}, {"rows", rows}, {"vocab", vocab_}};
}

TabularPolicy TabularPolicy::from_json(const json& j) {
  TabularPolicy policy(j.at("vocab").get<std::vector<std::string>>(),
                       j.at("order").get<int>());
  for (const auto& [key, row] : j.at("rows").items())
    policy.rows_[std::stoll(key)] = row.get<std::vector<double>>();
  return policy;
}

bool TabularPolicy::operator==(const TabularPolicy& other) const {
  return vocab_ == other.vocab_ && order_ == other.order_ &&
         rows_ == other.rows_;
}

}  // namespace gplan
