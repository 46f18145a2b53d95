// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace segrpo {

enum class Rubric {
  context_coverage,  // coverage of a reference context by a generated one
  logical_quality,   // five-criterion rubric on the reasoning segment
  open_similarity,   // similarity grading for open-ended answers
};

std::string_view rubric_name(Rubric rubric);
Rubric rubric_from_name(std::string_view name);

// A single judge verdict on the 0-5 scale.
struct JudgeScore {
  int raw_score = 0;  // in [0, 5]
  Rubric rubric = Rubric::context_coverage;

  bool operator==(const JudgeScore&) const = default;
};

}  // namespace segrpo
