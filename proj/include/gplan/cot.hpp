// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gplan {

class CotParseError : public std::runtime_error {
public:
  explicit CotParseError(const std::string& what)
      : std::runtime_error("cot parse error: " + what) {}
};

class StageOutOfRange : public std::runtime_error {
public:
  StageOutOfRange(int b, int total)
      : std::runtime_error("compression stage " + std::to_string(b) +
                           " exceeds block count " + std::to_string(total)) {}
};

enum class BlockKind { Context, Strategy, Step };

/// One semantic block of the teacher reasoning. Step blocks carry their
/// 1-based index.
struct CotBlock {
  BlockKind kind = BlockKind::Context;
  int step_index = 0;  // valid iff kind == Step
  std::string text;

  std::string open_tag() const;
  std::string close_tag() const;
  bool operator==(const CotBlock&) const = default;
};

/// Structured reasoning: exactly one CONTEXT, one STRATEGY, then
/// STEP_1..STEP_n in order.
struct StructuredCot {
  std::vector<CotBlock> blocks;

  int n_steps() const { return static_cast<int>(blocks.size()) - 2; }
  int block_count() const { return static_cast<int>(blocks.size()); }
  void validate() const;
  bool operator==(const StructuredCot&) const = default;
};

/// Parses "<THOUGHT>...</THOUGHT>" text into blocks. Whitespace between
/// tags is ignored; block bodies are kept verbatim.
StructuredCot parse_cot(const std::string& text);

/// Canonical rendering: wrapper and tagged blocks with no separators.
/// parse_cot(render_cot(r)) == r.
std::string render_cot(const StructuredCot& cot);

/// The reserved latent token inventory: K tokens per block, with step
/// triplets up to the configured maximum plan length.
class LatentVocab {
public:
  explicit LatentVocab(int k = 3, int max_steps = 8);

  int k() const { return k_; }
  int max_steps() const { return max_steps_; }

  std::string context_token(int j) const;
  std::string strategy_token(int j) const;
  std::string step_token(int step, int j) const;  // step is 1-based

  /// Latent tokens for one block of a CoT, in scaffold order.
  std::vector<std::string> block_tokens(const CotBlock& block) const;

  /// C, S, T_1..T_n — the expected fully latent sequence for an n-step plan.
  std::vector<std::string> expected_prefix(int n_steps) const;

  bool is_latent(const std::string& token) const {
    return tokens_.count(token) != 0;
  }
  std::vector<std::string> all_tokens() const;

private:
  int k_;
  int max_steps_;
  std::set<std::string> tokens_;
};

inline constexpr const char* kThoughtOpen = "<THOUGHT>";
inline constexpr const char* kThoughtClose = "</THOUGHT>";

/// Result of compressing the leading `b` blocks of a CoT. `tokens` is the
/// training-facing view (latent and tag tokens atomic, body text split on
/// whitespace); `text` is the exact surface form, with uncompressed blocks
/// byte-identical to the canonical source.
struct ScaffoldPrefix {
  int stage_b = 0;
  int total_blocks = 0;
  std::vector<std::string> tokens;
  std::string text;
};

ScaffoldPrefix compress(const StructuredCot& cot, int b,
                        const LatentVocab& vocab);

enum class DiagnosticCode {
  Valid,
  Wrapper,           // missing, duplicated, or inverted THOUGHT wrapper
  OutOfOrder,        // latent tokens repeat, skip, or leave the scaffold order
  ResidualTag,       // a raw XML tag survived inside the wrapper
  StepCountMismatch  // complete step triplets != plan length
};

const char* diagnostic_code_name(DiagnosticCode code);

struct DiagnosticResult {
  bool valid = false;
  DiagnosticCode code = DiagnosticCode::Valid;
  std::string detail;
};

/// Latent-structure validity check over a decoded token sequence. Applies
/// the wrapper, scaffold-order, residual-tag, and step-count criteria in
/// that order and reports the first failure. Tokens outside the wrapper
/// are not inspected.
DiagnosticResult validate_latent_prefix(const std::vector<std::string>& tokens,
                                        int plan_len,
                                        const LatentVocab& vocab);

}  // namespace gplan
