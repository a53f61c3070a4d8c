// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gplan/plan.hpp"

namespace gplan {

/// One training/evaluation sample. `plan` is kept as raw JSON because a
/// corrupted corpus may carry plans that are not valid Plan values (or
/// not valid JSON at all, stored as a string).
struct DatasetRecord {
  ContextBundle context;
  std::string cot;
  nlohmann::json plan;
  nlohmann::json corrupt;  // null unless the synthesizer planted a violation

  /// The plan field as raw text, the form the format tier consumes.
  std::string plan_text() const {
    return plan.is_string() ? plan.get<std::string>() : plan.dump();
  }
};

nlohmann::json record_to_json(const DatasetRecord& rec);
DatasetRecord record_from_json(const nlohmann::json& j,
                               std::shared_ptr<const ToolLibrary> library);

/// Provenance stamp embedded in every artifact this toolkit writes.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

/// FNV-1a 64-bit hash, hex-encoded. Stable across platforms, used to
/// fingerprint run configs in artifacts.
std::string fnv1a_hex(const std::string& data);

/// Reads a JSONL file. A leading {"_meta": ...} line, if present, is
/// returned separately; all remaining lines are parsed records.
struct JsonlFile {
  std::optional<nlohmann::json> meta;
  std::vector<nlohmann::json> lines;
};

JsonlFile read_jsonl(const std::filesystem::path& path);

/// Writes lines as JSONL, preceded by a {"_meta": provenance} line when
/// provenance is given.
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& lines,
                 const std::optional<Provenance>& provenance = std::nullopt);

std::vector<DatasetRecord> read_dataset(
    const std::filesystem::path& path,
    std::shared_ptr<const ToolLibrary> library);

void write_dataset(const std::filesystem::path& path,
                   const std::vector<DatasetRecord>& records,
                   const std::optional<Provenance>& provenance);

}  // namespace gplan
