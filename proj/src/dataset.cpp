// Copyright 2026 The gplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "gplan/dataset.hpp"

#include <fstream>

using nlohmann::json;

namespace gplan {

json record_to_json(const DatasetRecord& rec) {
  json j{{"context", context_to_json(rec.context)},
         {"cot", rec.cot},
         {"plan", rec.plan}};
  if (!rec.corrupt.is_null()) j["_corrupt"] = rec.corrupt;
  return j;
}

DatasetRecord record_from_json(const json& j,
                               std::shared_ptr<const ToolLibrary> library) {
  DatasetRecord rec;
  rec.context = context_from_json(j.at("context"), std::move(library));
  rec.cot = j.at("cot").get<std::string>();
  rec.plan = j.at("plan");
  if (j.contains("_corrupt")) rec.corrupt = j["_corrupt"];
  return rec;
}

json Provenance::to_json() const {
  return json{{"config_hash", config_hash}, {"seed", seed}};
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

JsonlFile read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  JsonlFile file;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (first && j.is_object() && j.contains("_meta")) {
      file.meta = j["_meta"];
    } else {
      file.lines.push_back(std::move(j));
    }
    first = false;
  }
  return file;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<json>& lines,
                 const std::optional<Provenance>& provenance) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (provenance)
    out << json{{"_meta", provenance->to_json()}}.dump() << "\n";
  for (const json& j : lines) out << j.dump() << "\n";
}

std::vector<DatasetRecord> read_dataset(
    const std::filesystem::path& path,
    std::shared_ptr<const ToolLibrary> library) {
  JsonlFile file = read_jsonl(path);
  std::vector<DatasetRecord> records;
  records.reserve(file.lines.size());
  for (const json& j : file.lines)
    records.push_back(record_from_json(j, library));
  return records;
}

void write_dataset(const std::filesystem::path& path,
                   const std::vector<DatasetRecord>& records,
                   const std::optional<Provenance>& provenance) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const DatasetRecord& rec : records) lines.push_back(record_to_json(rec));
  write_jsonl(path, lines, provenance);
}

}  // namespace gplan
