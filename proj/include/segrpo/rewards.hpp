// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "segrpo/judge.hpp"

namespace segrpo {

enum class AnswerType { mc_single, mc_multi, numeric, transcript, open_ended };

std::string_view answer_type_name(AnswerType type);
AnswerType answer_type_from_name(std::string_view name);

// Gold label for one sample. Exactly the fields matching the answer type are
// populated; construct through the factories.
class GoldSpec {
 public:
  static GoldSpec mc_single(char letter);
  static GoldSpec mc_multi(std::set<char> letters);
  static GoldSpec numeric(double value, double tolerance = 0.0);
  static GoldSpec transcript(std::string text);
  static GoldSpec open_ended(std::string text);

  AnswerType type() const { return type_; }
  char gold_choice() const;
  const std::set<char>& gold_set() const;
  double gold_number() const;
  double numeric_tolerance() const;
  const std::string& gold_text() const;

  nlohmann::json to_json() const;
  // `line` feeds error reporting for JSONL datasets; pass 0 elsewhere.
  static GoldSpec from_json(const nlohmann::json& j, int line = 0);

  bool operator==(const GoldSpec&) const = default;

 private:
  GoldSpec() = default;
  AnswerType type_ = AnswerType::mc_single;
  char choice_ = 0;
  std::set<char> set_;
  double number_ = 0.0;
  double tolerance_ = 0.0;
  std::string text_;
};

// Per-completion reward streams. A stream that is disabled for the current
// stage is absent, not zero.
struct RewardVector {
  std::optional<double> format;    // r_f
  std::optional<double> accuracy;  // r_a
  std::optional<double> context;   // r_c
  std::optional<double> logical;   // r_l

  bool operator==(const RewardVector&) const = default;
};

struct StreamSet {
  bool format = false;
  bool accuracy = false;
  bool context = false;
  bool logical = false;

  bool operator==(const StreamSet&) const = default;
};

// --- answer extraction helpers ---

// First standalone option letter (A-Z, case-insensitive, neighbours must be
// non-letters), uppercased.
std::optional<char> first_option_letter(std::string_view text);
// All standalone option letters, uppercased, as a set.
std::set<char> all_option_letters(std::string_view text);
// Last numeric literal (optional sign, decimal point, scientific notation).
std::optional<double> last_number(std::string_view text);
// Whitespace tokenization with lowercasing, as used for transcripts.
std::vector<std::string> transcript_words(std::string_view text);

// --- rule-based rewards ---

double mc_single_reward(std::string_view answer_text, const GoldSpec& gold);
double multi_answer_f1(const std::set<char>& pred_set,
                       const std::set<char>& gold_set);
// Word-level edit distance divided by |ref|; may exceed 1. Throws
// EmptyReference when ref is empty.
double wer(std::span<const std::string> ref_words,
           std::span<const std::string> hyp_words);
double transcript_reward(std::string_view answer_text, const GoldSpec& gold);
double numeric_reward(std::string_view answer_text, const GoldSpec& gold);

// --- judge-based rewards ---

double context_reward(const JudgeInterface& judge,
                      std::string_view generated_context,
                      std::string_view reference_context,
                      const RewardMapping& mapping);
double logical_reward(const JudgeInterface& judge,
                      std::string_view context_text,
                      std::string_view think_text,
                      const RewardMapping& mapping);

// Dispatch over the answer-type family. Open-ended answers go to the judge
// under the open_similarity rubric with `open_mapping` (scaled by default).
double accuracy_reward(std::string_view answer_text, const GoldSpec& gold,
                       const JudgeInterface& judge,
                       const RewardMapping& open_mapping =
                           RewardMapping::scaled());

}  // namespace segrpo
