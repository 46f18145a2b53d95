// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/dataset.hpp"

#include <algorithm>
#include <fstream>

#include "segrpo/errors.hpp"
#include "segrpo/format.hpp"
#include "segrpo/rng.hpp"

namespace segrpo {

namespace {

const std::set<std::string>& known_stages() {
  static const std::set<std::string> stages = {
      std::string(kStageColdStart), std::string(kStageRl1),
      std::string(kStageRl2)};
  return stages;
}

}  // namespace

nlohmann::json SampleRecord::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["prompt"] = prompt;
  if (!modality_note.empty()) {
    j["modality_note"] = modality_note;
  }
  if (reference_context) {
    j["reference_context"] = *reference_context;
  }
  j["gold"] = gold.to_json();
  j["stage_tags"] = stage_tags;
  if (!category.empty()) {
    j["category"] = category;
  }
  return j;
}

SampleRecord SampleRecord::from_json(const nlohmann::json& j, int line) {
  auto require_string = [&](const char* field) -> std::string {
    if (!j.contains(field) || !j[field].is_string()) {
      throw SchemaError(line, field, "required string field");
    }
    return j[field].get<std::string>();
  };

  SampleRecord rec;
  rec.id = require_string("id");
  if (rec.id.empty()) {
    throw SchemaError(line, "id", "must be non-empty");
  }
  rec.prompt = require_string("prompt");
  rec.modality_note = j.value("modality_note", std::string());
  if (j.contains("reference_context")) {
    if (!j["reference_context"].is_string()) {
      throw SchemaError(line, "reference_context", "must be a string");
    }
    rec.reference_context = j["reference_context"].get<std::string>();
  }
  if (!j.contains("gold")) {
    throw SchemaError(line, "gold", "required object field");
  }
  rec.gold = GoldSpec::from_json(j["gold"], line);
  if (j.contains("stage_tags")) {
    if (!j["stage_tags"].is_array()) {
      throw SchemaError(line, "stage_tags", "must be an array of strings");
    }
    for (const auto& tag : j["stage_tags"]) {
      if (!tag.is_string()) {
        throw SchemaError(line, "stage_tags", "must be an array of strings");
      }
      std::string s = tag.get<std::string>();
      if (!known_stages().count(s)) {
        throw SchemaError(line, "stage_tags", "unknown stage tag '" + s + "'");
      }
      rec.stage_tags.insert(std::move(s));
    }
  }
  rec.category = j.value("category", std::string());

  if (rec.stage_tags.count(std::string(kStageRl1)) &&
      (!rec.reference_context || rec.reference_context->empty())) {
    throw SchemaError(line, "reference_context",
                      "rl_stage1 records must carry a reference context");
  }
  return rec;
}

std::vector<SampleRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open dataset file '" + path + "'");
  }
  std::vector<SampleRecord> records;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) {
          return std::isspace(c) != 0;
        })) {
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(line_no, "", std::string("invalid JSON: ") + e.what());
    }
    SampleRecord rec = SampleRecord::from_json(j, line_no);
    if (!seen_ids.insert(rec.id).second) {
      throw DuplicateId(rec.id);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void save_dataset(const std::string& path,
                  std::span<const SampleRecord> records) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write dataset file '" + path + "'");
  }
  for (const SampleRecord& rec : records) {
    out << rec.to_json().dump() << '\n';
  }
}

StreamSet stage_config(std::string_view stage) {
  if (stage == kStageRl1) {
    return StreamSet{true, true, true, true};
  }
  if (stage == kStageRl2) {
    return StreamSet{true, true, false, false};
  }
  throw UnknownStage(std::string(stage));
}

std::vector<FilteredRecord> difficulty_filter(
    const RolloutFn& rollout, std::span<const SampleRecord> records, int G,
    double low, double high, std::uint64_t seed, const JudgeInterface& judge) {
  if (G < 1) {
    throw ConfigError("difficulty filter needs G >= 1");
  }
  if (!(0.0 <= low && low < high && high <= 1.0)) {
    throw ConfigError("difficulty filter needs 0 <= low < high <= 1");
  }

  std::vector<FilteredRecord> retained;
  for (const SampleRecord& rec : records) {
    double sum = 0.0;
    for (int i = 0; i < G; ++i) {
      std::uint64_t completion_seed =
          derive_seed(seed, "filter", hash_str(rec.id), i);
      std::string text = rollout(rec, i, completion_seed);
      // Accuracy is measured from the answer segment when one exists, even
      // in otherwise malformed completions; otherwise it counts 0.
      if (auto answer = find_block(text, Tag::answer)) {
        sum += accuracy_reward(*answer, rec.gold, judge);
      }
    }
    double acc = sum / static_cast<double>(G);
    if (low < acc && acc < high) {
      retained.push_back(FilteredRecord{rec, acc});
    }
  }
  return retained;
}

void save_filtered(const std::string& path,
                   std::span<const FilteredRecord> records) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write filtered dataset file '" + path + "'");
  }
  for (const FilteredRecord& fr : records) {
    nlohmann::json j = fr.record.to_json();
    j["measured_accuracy"] = fr.measured_accuracy;
    out << j.dump() << '\n';
  }
}

}  // namespace segrpo
