// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/cot.hpp"

#include <algorithm>
#include <sstream>

namespace gplan {

std::string CotBlock::open_tag() const {
  switch (kind) {
    case BlockKind::Context: return "<CONTEXT>";
    case BlockKind::Strategy: return "<STRATEGY>";
    case BlockKind::Step: return "<STEP_" + std::to_string(step_index) + ">";
  }
  return {};
}

std::string CotBlock::close_tag() const {
  std::string open = open_tag();
  return "</" + open.substr(1);
}

void StructuredCot::validate() const {
  if (blocks.size() < 3)
    throw CotParseError("a CoT needs CONTEXT, STRATEGY, and at least one STEP");
  if (blocks[0].kind != BlockKind::Context)
    throw CotParseError("first block must be CONTEXT");
  if (blocks[1].kind != BlockKind::Strategy)
    throw CotParseError("second block must be STRATEGY");
  for (std::size_t i = 2; i < blocks.size(); ++i) {
    if (blocks[i].kind != BlockKind::Step)
      throw CotParseError("blocks after STRATEGY must be STEP blocks");
    if (blocks[i].step_index != static_cast<int>(i) - 1)
      throw CotParseError("step indices must run 1..n contiguously");
  }
}

namespace {

const char* const kBodyForbidden[] = {"<CONTEXT>",  "</CONTEXT>",
                                      "<STRATEGY>", "</STRATEGY>",
                                      "<STEP_",     "</STEP_",
                                      "<THOUGHT>",  "</THOUGHT>"};

void check_body(const std::string& body) {
  for (const char* tag : kBodyForbidden)
    if (body.find(tag) != std::string::npos)
      throw CotParseError("interleaved tag inside block body");
}

std::size_t skip_ws(const std::string& s, std::size_t pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
    ++pos;
  return pos;
}

bool starts_with(const std::string& s, std::size_t pos, const std::string& t) {
  return s.compare(pos, t.size(), t) == 0;
}

// Reads "<TAG>body</TAG>" at pos; returns body and advances pos.
std::string read_block_body(const std::string& s, std::size_t& pos,
                            const std::string& open, const std::string& close) {
  if (!starts_with(s, pos, open))
    throw CotParseError("expected " + open);
  pos += open.size();
  std::size_t end = s.find(close, pos);
  if (end == std::string::npos)
    throw CotParseError("missing " + close);
  std::string body = s.substr(pos, end - pos);
  check_body(body);
  pos = end + close.size();
  return body;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

}  // namespace

StructuredCot parse_cot(const std::string& text) {
  std::size_t pos = skip_ws(text, 0);
  if (!starts_with(text, pos, kThoughtOpen))
    throw CotParseError("missing <THOUGHT> wrapper");
  pos += std::string(kThoughtOpen).size();

  StructuredCot cot;
  pos = skip_ws(text, pos);
  CotBlock context{BlockKind::Context, 0,
                   read_block_body(text, pos, "<CONTEXT>", "</CONTEXT>")};
  cot.blocks.push_back(std::move(context));

  pos = skip_ws(text, pos);
  CotBlock strategy{BlockKind::Strategy, 0,
                    read_block_body(text, pos, "<STRATEGY>", "</STRATEGY>")};
  cot.blocks.push_back(std::move(strategy));

  int step = 1;
  while (true) {
    pos = skip_ws(text, pos);
    if (starts_with(text, pos, kThoughtClose)) break;
    std::string open = "<STEP_" + std::to_string(step) + ">";
    std::string close = "</STEP_" + std::to_string(step) + ">";
    if (!starts_with(text, pos, open)) {
      if (starts_with(text, pos, "<STEP_"))
        throw CotParseError("step indices must run 1..n contiguously");
      throw CotParseError("unexpected content before </THOUGHT>");
    }
    CotBlock block{BlockKind::Step, step,
                   read_block_body(text, pos, open, close)};
    cot.blocks.push_back(std::move(block));
    ++step;
  }
  pos += std::string(kThoughtClose).size();
  pos = skip_ws(text, pos);
  if (pos != text.size())
    throw CotParseError("trailing content after </THOUGHT>");

  cot.validate();
  return cot;
}

std::string render_cot(const StructuredCot& cot) {
  std::string out = kThoughtOpen;
  for (const CotBlock& b : cot.blocks)
    out += b.open_tag() + b.text + b.close_tag();
  out += kThoughtClose;
  return out;
}

LatentVocab::LatentVocab(int k, int max_steps) : k_(k), max_steps_(max_steps) {
  if (k < 1 || k > 26)
    throw std::invalid_argument("latent vocab K must be in [1, 26]");
  if (max_steps < 1)
    throw std::invalid_argument("latent vocab max_steps must be >= 1");
  for (int j = 0; j < k; ++j) {
    tokens_.insert(context_token(j));
    tokens_.insert(strategy_token(j));
  }
  for (int i = 1; i <= max_steps; ++i)
    for (int j = 0; j < k; ++j) tokens_.insert(step_token(i, j));
}

namespace {
char suffix_letter(int j) { return static_cast<char>('A' + j); }
}  // namespace

std::string LatentVocab::context_token(int j) const {
  return std::string("<THOUGHT_CONTEXT_") + suffix_letter(j) + ">";
}

std::string LatentVocab::strategy_token(int j) const {
  return std::string("<THOUGHT_STRATEGY_") + suffix_letter(j) + ">";
}

std::string LatentVocab::step_token(int step, int j) const {
  return "<T_" + std::to_string(step) + "_" + suffix_letter(j) + ">";
}

std::vector<std::string> LatentVocab::block_tokens(const CotBlock& block) const {
  std::vector<std::string> out;
  out.reserve(k_);
  for (int j = 0; j < k_; ++j) {
    switch (block.kind) {
      case BlockKind::Context: out.push_back(context_token(j)); break;
      case BlockKind::Strategy: out.push_back(strategy_token(j)); break;
      case BlockKind::Step: out.push_back(step_token(block.step_index, j)); break;
    }
  }
  return out;
}

std::vector<std::string> LatentVocab::expected_prefix(int n_steps) const {
  std::vector<std::string> out;
  for (int j = 0; j < k_; ++j) out.push_back(context_token(j));
  for (int j = 0; j < k_; ++j) out.push_back(strategy_token(j));
  for (int i = 1; i <= n_steps; ++i)
    for (int j = 0; j < k_; ++j) out.push_back(step_token(i, j));
  return out;
}

std::vector<std::string> LatentVocab::all_tokens() const {
  return expected_prefix(max_steps_);
}

ScaffoldPrefix compress(const StructuredCot& cot, int b,
                        const LatentVocab& vocab) {
  cot.validate();
  const int total = cot.block_count();
  if (b < 0 || b > total) throw StageOutOfRange(b, total);
  if (cot.n_steps() > vocab.max_steps())
    throw StageOutOfRange(cot.n_steps(), vocab.max_steps());

  ScaffoldPrefix out;
  out.stage_b = b;
  out.total_blocks = total;
  out.tokens.push_back(kThoughtOpen);
  out.text = kThoughtOpen;

  std::string latent_run;
  for (int i = 0; i < b; ++i) {
    for (const std::string& tok : vocab.block_tokens(cot.blocks[i])) {
      latent_run += " " + tok;
      out.tokens.push_back(tok);
    }
  }
  if (b > 0) out.text += latent_run + " ";

  for (int i = b; i < total; ++i) {
    const CotBlock& block = cot.blocks[i];
    out.text += block.open_tag() + block.text + block.close_tag();
    out.tokens.push_back(block.open_tag());
    for (std::string& word : split_ws(block.text))
      out.tokens.push_back(std::move(word));
    out.tokens.push_back(block.close_tag());
  }

  out.text += kThoughtClose;
  out.tokens.push_back(kThoughtClose);
  return out;
}

const char* diagnostic_code_name(DiagnosticCode code) {
  switch (code) {
    case DiagnosticCode::Valid: return "VALID";
    case DiagnosticCode::Wrapper: return "WRAPPER";
    case DiagnosticCode::OutOfOrder: return "OUT_OF_ORDER";
    case DiagnosticCode::ResidualTag: return "RESIDUAL_TAG";
    case DiagnosticCode::StepCountMismatch: return "STEP_COUNT_MISMATCH";
  }
  return "UNKNOWN";
}

namespace {

bool tag_shaped(const std::string& token) {
  return token.size() >= 3 && token.front() == '<' && token.back() == '>';
}

DiagnosticResult fail(DiagnosticCode code, std::string detail) {
  return DiagnosticResult{false, code, std::move(detail)};
}

}  // namespace

DiagnosticResult validate_latent_prefix(const std::vector<std::string>& tokens,
                                        int plan_len,
                                        const LatentVocab& vocab) {
  std::vector<std::size_t> opens, closes;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == kThoughtOpen) opens.push_back(i);
    if (tokens[i] == kThoughtClose) closes.push_back(i);
  }
  if (opens.size() != 1 || closes.size() != 1 || opens[0] > closes[0])
    return fail(DiagnosticCode::Wrapper,
                "expected exactly one <THOUGHT>...</THOUGHT> block");

  std::vector<std::string> latent;
  std::vector<std::string> residual;
  for (std::size_t i = opens[0] + 1; i < closes[0]; ++i) {
    const std::string& tok = tokens[i];
    if (vocab.is_latent(tok))
      latent.push_back(tok);
    else if (tag_shaped(tok))
      residual.push_back(tok);
  }

  // Scaffold order: the latent tokens must be an exact prefix of
  // C, S, T_1..T_max and stop on a block boundary.
  const std::vector<std::string> expected =
      vocab.expected_prefix(vocab.max_steps());
  if (latent.size() > expected.size())
    return fail(DiagnosticCode::OutOfOrder, "more latent tokens than scaffold");
  for (std::size_t i = 0; i < latent.size(); ++i)
    if (latent[i] != expected[i])
      return fail(DiagnosticCode::OutOfOrder,
                  "expected " + expected[i] + ", saw " + latent[i]);
  const std::size_t k = static_cast<std::size_t>(vocab.k());
  if (latent.size() % k != 0)
    return fail(DiagnosticCode::OutOfOrder, "incomplete latent triplet");

  if (!residual.empty())
    return fail(DiagnosticCode::ResidualTag, "residual tag " + residual[0]);

  const long blocks = static_cast<long>(latent.size() / k);
  const long steps = blocks - 2;
  if (steps < 0)
    return fail(DiagnosticCode::StepCountMismatch,
                "scaffold shorter than CONTEXT + STRATEGY");
  if (steps != plan_len)
    return fail(DiagnosticCode::StepCountMismatch,
                "saw " + std::to_string(steps) + " step triplets, plan length " +
                    std::to_string(plan_len));

  return DiagnosticResult{true, DiagnosticCode::Valid, ""};
}

}  // namespace gplan
