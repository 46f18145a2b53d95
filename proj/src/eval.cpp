// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/eval.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "segrpo/errors.hpp"
#include "segrpo/format.hpp"

namespace segrpo {

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open predictions file '" + path + "'");
  }
  std::vector<PredictionRecord> out;
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
    if (!j.contains("id") || !j["id"].is_string()) {
      throw SchemaError(line_no, "id", "required string field");
    }
    if (!j.contains("response") || !j["response"].is_string()) {
      throw SchemaError(line_no, "response", "required string field");
    }
    out.push_back(PredictionRecord{j["id"].get<std::string>(),
                                   j["response"].get<std::string>()});
  }
  return out;
}

std::string extract_answer(std::string_view raw_response) {
  ParseResult parsed = parse_tagged_response(raw_response);
  if (const auto* resp = std::get_if<TaggedResponse>(&parsed)) {
    return resp->answer_text;
  }
  return std::string(raw_response);
}

namespace {

struct NullJudge : JudgeInterface {
  JudgeScore evaluate(Rubric, std::string_view, std::string_view) const override {
    throw DataError(
        "open_ended records cannot be scored by the offline eval harness");
  }
};

const char* metric_for(AnswerType type) {
  switch (type) {
    case AnswerType::mc_single:
    case AnswerType::numeric:
      return "accuracy";
    case AnswerType::mc_multi:
      return "f1";
    case AnswerType::transcript:
      return "transcript";
    case AnswerType::open_ended:
      break;
  }
  return "unsupported";
}

}  // namespace

nlohmann::json ScoreReport::to_json() const {
  nlohmann::json per_cat = nlohmann::json::object();
  for (const auto& [name, score] : per_category) {
    per_cat[name] = {{"metric", score.metric},
                     {"value", score.value},
                     {"count", score.count}};
  }
  return nlohmann::json{{"aggregate", aggregate},
                        {"num_questions", num_questions},
                        {"downgraded_missing", downgraded_missing},
                        {"per_category", std::move(per_cat)}};
}

std::string ScoreReport::to_table() const {
  std::size_t name_width = 8;
  for (const auto& [name, score] : per_category) {
    name_width = std::max(name_width, name.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_width) + 2)
      << "category" << std::setw(12) << "metric" << std::setw(10) << "value"
      << "count\n";
  for (const auto& [name, score] : per_category) {
    out << std::left << std::setw(static_cast<int>(name_width) + 2) << name
        << std::setw(12) << score.metric << std::setw(10) << std::fixed
        << std::setprecision(4) << score.value << score.count << '\n';
  }
  out << std::left << std::setw(static_cast<int>(name_width) + 2)
      << "aggregate" << std::setw(12) << "" << std::setw(10) << std::fixed
      << std::setprecision(4) << aggregate << num_questions << '\n';
  return out.str();
}

ScoreReport score_benchmark(std::span<const PredictionRecord> predictions,
                            std::span<const SampleRecord> gold,
                            const ScoreOptions& options) {
  std::unordered_map<std::string, const PredictionRecord*> by_id;
  for (const PredictionRecord& pred : predictions) {
    if (!by_id.emplace(pred.id, &pred).second) {
      throw DuplicateId(pred.id);
    }
  }
  std::unordered_map<std::string, const SampleRecord*> gold_ids;
  for (const SampleRecord& rec : gold) {
    gold_ids.emplace(rec.id, &rec);
  }
  for (const PredictionRecord& pred : predictions) {
    if (!gold_ids.count(pred.id)) {
      throw UnknownId(pred.id);
    }
  }

  NullJudge no_judge;
  struct Accum {
    double sum = 0.0;
    std::size_t count = 0;
    std::set<std::string> metrics;
  };
  std::map<std::string, Accum> by_category;

  ScoreReport report;
  double total = 0.0;
  for (const SampleRecord& rec : gold) {
    double score = 0.0;
    auto it = by_id.find(rec.id);
    if (it == by_id.end()) {
      if (!options.missing_as_zero) {
        throw MissingPrediction(rec.id);
      }
      ++report.downgraded_missing;
      // open_ended is unsupported even when downgrading, keep that strict.
      if (rec.gold.type() == AnswerType::open_ended) {
        throw DataError(
            "open_ended records cannot be scored by the offline eval harness");
      }
    } else {
      std::string answer = extract_answer(it->second->raw_response);
      score = accuracy_reward(answer, rec.gold, no_judge);
    }
    std::string category = rec.category.empty() ? "uncategorized" : rec.category;
    Accum& acc = by_category[category];
    acc.sum += score;
    acc.count += 1;
    acc.metrics.insert(metric_for(rec.gold.type()));
    total += score;
    ++report.num_questions;
  }

  for (const auto& [name, acc] : by_category) {
    CategoryScore cs;
    cs.metric = acc.metrics.size() == 1 ? *acc.metrics.begin() : "mixed";
    cs.value = acc.sum / static_cast<double>(acc.count);
    cs.count = acc.count;
    report.per_category.emplace(name, std::move(cs));
  }
  report.aggregate =
      report.num_questions == 0 ? 0.0
                                : total / static_cast<double>(report.num_questions);
  return report;
}

}  // namespace segrpo
