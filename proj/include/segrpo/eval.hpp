// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "segrpo/dataset.hpp"

namespace segrpo {

struct PredictionRecord {
  std::string id;
  std::string raw_response;
};

// JSON-lines {"id": ..., "response": ...}.
std::vector<PredictionRecord> load_predictions(const std::string& path);

// Inner answer text when the response parses as a tagged response; the raw
// response otherwise, so untagged baseline outputs still score.
std::string extract_answer(std::string_view raw_response);

struct CategoryScore {
  std::string metric;  // "accuracy", "f1", "transcript" or "mixed"
  double value = 0.0;
  std::size_t count = 0;
};

struct ScoreReport {
  std::map<std::string, CategoryScore> per_category;
  double aggregate = 0.0;  // question-count-weighted mean
  std::size_t num_questions = 0;
  std::size_t downgraded_missing = 0;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

struct ScoreOptions {
  // When set, missing predictions score 0 and are counted in the report
  // instead of raising MissingPrediction.
  bool missing_as_zero = false;
};

// Scores predictions against the gold records, grouped by record category
// (empty categories fall under "uncategorized"). mc_single and numeric
// records score by accuracy, mc_multi by per-question F1, transcript by the
// clamped 1-WER reward. open_ended records are rejected: the offline scorer
// has no judge.
ScoreReport score_benchmark(std::span<const PredictionRecord> predictions,
                            std::span<const SampleRecord> gold,
                            const ScoreOptions& options = {});

}  // namespace segrpo
