// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "segrpo/judge.hpp"
#include "segrpo/rewards.hpp"

namespace segrpo {

inline constexpr std::string_view kStageColdStart = "cold_start";
inline constexpr std::string_view kStageRl1 = "rl_stage1";
inline constexpr std::string_view kStageRl2 = "rl_stage2";

// One dataset row. Video/audio payloads are out of scope; modality_note is a
// free-text placeholder for them.
struct SampleRecord {
  std::string id;
  std::string prompt;
  std::string modality_note;
  std::optional<std::string> reference_context;
  GoldSpec gold = GoldSpec::mc_single('A');
  std::set<std::string> stage_tags;
  std::string category;  // optional grouping key for the eval harness

  nlohmann::json to_json() const;
  static SampleRecord from_json(const nlohmann::json& j, int line);
  bool operator==(const SampleRecord&) const = default;
};

// JSON-lines loader. Validates per-record invariants (rl_stage1 records must
// carry a non-empty reference_context) and id uniqueness; errors carry line
// numbers.
std::vector<SampleRecord> load_dataset(const std::string& path);
void save_dataset(const std::string& path,
                  std::span<const SampleRecord> records);

// Reward streams enabled for an RL stage. Stage 1 uses all four; stage 2
// only format and accuracy. cold_start is a config label only and is
// rejected here.
StreamSet stage_config(std::string_view stage);

// Produces one completion text for a record. The seed is derived from the
// filter seed, the record id and the completion index, so filtering is
// insensitive to record order and idempotent on its own output.
using RolloutFn = std::function<std::string(
    const SampleRecord& record, int completion_index, std::uint64_t seed)>;

struct FilteredRecord {
  SampleRecord record;
  double measured_accuracy = 0.0;
};

// Rollout-accuracy difficulty filter: samples G completions per record,
// measures the mean accuracy reward (answer segment only; completions with
// no answer block count 0), and retains records with low < acc < high,
// strict on both ends. Output order follows input order.
std::vector<FilteredRecord> difficulty_filter(
    const RolloutFn& rollout, std::span<const SampleRecord> records, int G,
    double low, double high, std::uint64_t seed, const JudgeInterface& judge);

void save_filtered(const std::string& path,
                   std::span<const FilteredRecord> records);

}  // namespace segrpo
