// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/rewards.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>

#include "segrpo/errors.hpp"

namespace segrpo {

namespace {

bool is_letter(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

char upper(char c) {
  return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

bool standalone_at(std::string_view text, std::size_t i) {
  if (!is_letter(text[i])) return false;
  if (i > 0 && is_letter(text[i - 1])) return false;
  if (i + 1 < text.size() && is_letter(text[i + 1])) return false;
  return true;
}

const std::regex& number_regex() {
  static const std::regex re(
      R"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)");
  return re;
}

}  // namespace

std::string_view answer_type_name(AnswerType type) {
  switch (type) {
    case AnswerType::mc_single:
      return "mc_single";
    case AnswerType::mc_multi:
      return "mc_multi";
    case AnswerType::numeric:
      return "numeric";
    case AnswerType::transcript:
      return "transcript";
    case AnswerType::open_ended:
      return "open_ended";
  }
  return "";
}

AnswerType answer_type_from_name(std::string_view name) {
  if (name == "mc_single") return AnswerType::mc_single;
  if (name == "mc_multi") return AnswerType::mc_multi;
  if (name == "numeric") return AnswerType::numeric;
  if (name == "transcript") return AnswerType::transcript;
  if (name == "open_ended") return AnswerType::open_ended;
  throw DataError("unknown answer_type '" + std::string(name) + "'");
}

GoldSpec GoldSpec::mc_single(char letter) {
  GoldSpec g;
  g.type_ = AnswerType::mc_single;
  g.choice_ = upper(letter);
  if (!is_letter(g.choice_)) {
    throw DataError("mc_single gold choice must be a letter");
  }
  return g;
}

GoldSpec GoldSpec::mc_multi(std::set<char> letters) {
  GoldSpec g;
  g.type_ = AnswerType::mc_multi;
  for (char c : letters) {
    if (!is_letter(c)) throw DataError("mc_multi gold letters must be letters");
    g.set_.insert(upper(c));
  }
  if (g.set_.empty()) {
    throw DataError("mc_multi gold set must be non-empty");
  }
  return g;
}

GoldSpec GoldSpec::numeric(double value, double tolerance) {
  if (tolerance < 0.0) {
    throw DataError("numeric tolerance must be non-negative");
  }
  GoldSpec g;
  g.type_ = AnswerType::numeric;
  g.number_ = value;
  g.tolerance_ = tolerance;
  return g;
}

GoldSpec GoldSpec::transcript(std::string text) {
  GoldSpec g;
  g.type_ = AnswerType::transcript;
  g.text_ = std::move(text);
  return g;
}

GoldSpec GoldSpec::open_ended(std::string text) {
  GoldSpec g;
  g.type_ = AnswerType::open_ended;
  g.text_ = std::move(text);
  return g;
}

char GoldSpec::gold_choice() const {
  if (type_ != AnswerType::mc_single) {
    throw DataError("gold_choice only valid for mc_single");
  }
  return choice_;
}

const std::set<char>& GoldSpec::gold_set() const {
  if (type_ != AnswerType::mc_multi) {
    throw DataError("gold_set only valid for mc_multi");
  }
  return set_;
}

double GoldSpec::gold_number() const {
  if (type_ != AnswerType::numeric) {
    throw DataError("gold_number only valid for numeric");
  }
  return number_;
}

double GoldSpec::numeric_tolerance() const {
  if (type_ != AnswerType::numeric) {
    throw DataError("numeric_tolerance only valid for numeric");
  }
  return tolerance_;
}

const std::string& GoldSpec::gold_text() const {
  if (type_ != AnswerType::transcript && type_ != AnswerType::open_ended) {
    throw DataError("gold_text only valid for transcript/open_ended");
  }
  return text_;
}

nlohmann::json GoldSpec::to_json() const {
  nlohmann::json j;
  j["answer_type"] = std::string(answer_type_name(type_));
  switch (type_) {
    case AnswerType::mc_single:
      j["gold_choice"] = std::string(1, choice_);
      break;
    case AnswerType::mc_multi: {
      auto arr = nlohmann::json::array();
      for (char c : set_) arr.push_back(std::string(1, c));
      j["gold_set"] = std::move(arr);
      break;
    }
    case AnswerType::numeric:
      j["gold_number"] = number_;
      j["numeric_tolerance"] = tolerance_;
      break;
    case AnswerType::transcript:
    case AnswerType::open_ended:
      j["gold_text"] = text_;
      break;
  }
  return j;
}

GoldSpec GoldSpec::from_json(const nlohmann::json& j, int line) {
  auto fail = [line](const std::string& field, const std::string& msg) -> void {
    throw SchemaError(line, field, msg);
  };
  if (!j.is_object() || !j.contains("answer_type") ||
      !j["answer_type"].is_string()) {
    fail("gold.answer_type", "required string field");
  }
  AnswerType type;
  try {
    type = answer_type_from_name(j["answer_type"].get<std::string>());
  } catch (const DataError& e) {
    fail("gold.answer_type", e.what());
    throw;  // unreachable
  }

  // Exactly the fields matching the answer type may be present.
  static const std::set<std::string> known = {
      "answer_type", "gold_choice", "gold_set",
      "gold_number", "numeric_tolerance", "gold_text"};
  std::set<std::string> allowed = {"answer_type"};
  switch (type) {
    case AnswerType::mc_single:
      allowed.insert("gold_choice");
      break;
    case AnswerType::mc_multi:
      allowed.insert("gold_set");
      break;
    case AnswerType::numeric:
      allowed.insert("gold_number");
      allowed.insert("numeric_tolerance");
      break;
    case AnswerType::transcript:
    case AnswerType::open_ended:
      allowed.insert("gold_text");
      break;
  }
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) && !allowed.count(key)) {
      fail("gold." + key, "field does not match answer_type");
    }
  }

  try {
    switch (type) {
      case AnswerType::mc_single: {
        std::string s = j.at("gold_choice").get<std::string>();
        if (s.size() != 1) fail("gold.gold_choice", "must be one letter");
        return GoldSpec::mc_single(s[0]);
      }
      case AnswerType::mc_multi: {
        std::set<char> letters;
        for (const auto& item : j.at("gold_set")) {
          std::string s = item.get<std::string>();
          if (s.size() != 1) fail("gold.gold_set", "entries must be letters");
          letters.insert(s[0]);
        }
        return GoldSpec::mc_multi(std::move(letters));
      }
      case AnswerType::numeric:
        return GoldSpec::numeric(j.at("gold_number").get<double>(),
                                 j.value("numeric_tolerance", 0.0));
      case AnswerType::transcript:
        return GoldSpec::transcript(j.at("gold_text").get<std::string>());
      case AnswerType::open_ended:
        return GoldSpec::open_ended(j.at("gold_text").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail("gold", e.what());
  } catch (const DataError& e) {
    fail("gold", e.what());
  }
  throw SchemaError(line, "gold", "unreachable");
}

std::optional<char> first_option_letter(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (standalone_at(text, i)) {
      return upper(text[i]);
    }
  }
  return std::nullopt;
}

std::set<char> all_option_letters(std::string_view text) {
  std::set<char> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (standalone_at(text, i)) {
      out.insert(upper(text[i]));
    }
  }
  return out;
}

std::optional<double> last_number(std::string_view text) {
  std::match_results<std::string_view::const_iterator> m;
  auto begin = std::regex_iterator<std::string_view::const_iterator>(
      text.begin(), text.end(), number_regex());
  auto end = std::regex_iterator<std::string_view::const_iterator>();
  std::optional<std::string> last;
  for (auto it = begin; it != end; ++it) {
    last = it->str();
  }
  if (!last) {
    return std::nullopt;
  }
  try {
    return std::stod(*last);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::string> transcript_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) {
    out.push_back(std::move(cur));
  }
  return out;
}

double mc_single_reward(std::string_view answer_text, const GoldSpec& gold) {
  auto letter = first_option_letter(answer_text);
  if (!letter) {
    return 0.0;
  }
  return *letter == gold.gold_choice() ? 1.0 : 0.0;
}

double multi_answer_f1(const std::set<char>& pred_set,
                       const std::set<char>& gold_set) {
  if (gold_set.empty()) {
    throw DataError("multi_answer_f1 requires a non-empty gold set");
  }
  std::size_t inter = 0;
  for (char c : pred_set) {
    inter += gold_set.count(c);
  }
  double precision =
      pred_set.empty() ? 0.0
                       : static_cast<double>(inter) /
                             static_cast<double>(pred_set.size());
  double recall =
      static_cast<double>(inter) / static_cast<double>(gold_set.size());
  if (precision + recall == 0.0) {
    return 0.0;
  }
  return 2.0 * precision * recall / (precision + recall);
}

double wer(std::span<const std::string> ref_words,
           std::span<const std::string> hyp_words) {
  if (ref_words.empty()) {
    throw EmptyReference("WER reference word sequence is empty");
  }
  const std::size_t n = ref_words.size();
  const std::size_t m = hyp_words.size();
  // Unit-cost Levenshtein, rolling rows.
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    prev[j] = j;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (ref_words[i - 1] == hyp_words[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[m]) / static_cast<double>(n);
}

double transcript_reward(std::string_view answer_text, const GoldSpec& gold) {
  std::vector<std::string> ref = transcript_words(gold.gold_text());
  std::vector<std::string> hyp = transcript_words(answer_text);
  return std::max(0.0, 1.0 - wer(ref, hyp));
}

double numeric_reward(std::string_view answer_text, const GoldSpec& gold) {
  auto value = last_number(answer_text);
  if (!value) {
    return 0.0;
  }
  return std::abs(*value - gold.gold_number()) <= gold.numeric_tolerance()
             ? 1.0
             : 0.0;
}

double context_reward(const JudgeInterface& judge,
                      std::string_view generated_context,
                      std::string_view reference_context,
                      const RewardMapping& mapping) {
  JudgeScore score = judge.evaluate(Rubric::context_coverage,
                                    reference_context, generated_context);
  return judge_score_to_reward(score, mapping);
}

double logical_reward(const JudgeInterface& judge,
                      std::string_view context_text,
                      std::string_view think_text,
                      const RewardMapping& mapping) {
  JudgeScore score =
      judge.evaluate(Rubric::logical_quality, context_text, think_text);
  return judge_score_to_reward(score, mapping);
}

double accuracy_reward(std::string_view answer_text, const GoldSpec& gold,
                       const JudgeInterface& judge,
                       const RewardMapping& open_mapping) {
  switch (gold.type()) {
    case AnswerType::mc_single:
      return mc_single_reward(answer_text, gold);
    case AnswerType::mc_multi:
      return multi_answer_f1(all_option_letters(answer_text), gold.gold_set());
    case AnswerType::numeric:
      return numeric_reward(answer_text, gold);
    case AnswerType::transcript:
      return transcript_reward(answer_text, gold);
    case AnswerType::open_ended: {
      JudgeScore score = judge.evaluate(Rubric::open_similarity,
                                        gold.gold_text(), answer_text);
      return judge_score_to_reward(score, open_mapping);
    }
  }
  return 0.0;
}

}  // namespace segrpo
