// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/prompts.hpp"

#include "segrpo/errors.hpp"

namespace segrpo {

namespace {

constexpr std::string_view kContextCoverageTemplate =
    R"__(You are assessing how well the `hypothesis' text covers the key information from the `reference' text. Differences in wording or extra details in the `hypothesis' are fine if the reference's main points are included:

Score based on this coverage:

5 points : Hypothesis clearly and accurately reflects significant core themes or key aspects of the reference. It demonstrates a good understanding of a substantial part of the reference material.

4 points : Hypothesis reflects some important themes or aspects of the reference. The connection is evident, though perhaps not as comprehensive or central as a 5.

2 points : Hypothesis shows a recognizable connection to themes or aspects of the reference, but it might be more superficial, focus on less central points, or only partially grasp a key aspect.

1 points : Hypothesis has a tenuous or very limited connection to the reference. It might touch on a peripheral detail or a heavily reinterpreted aspect, but largely misses the main substance.

0 points : Hypothesis does not reflect any significant themes or key aspects of the reference, or is on a completely different topic.

Example analysis process:

Identify main themes and key aspects in `reference'.
Determine if `hypothesis' connects to or discusses any of these themes/aspects from `reference'.
Judge the strength and relevance of this connection. Is a core part of the `reference' reflected?
Differences are expected; evaluate if the `hypothesis' still meaningfully reflects some key part of the `reference'.

Assign score based on how well a significant aspect is reflected.

reference: {reference}
hypothesis: {hypothesis}

only return the score number:
)__";

constexpr std::string_view kLogicalRubricTemplate =
    R"__(Please analyze whether the reasoning text is derived from the evidence and context text based on the following criteria and give a score of 0-5:
Grading criteria description (relevance and rationality):

Integration of Clues (1 point): During the reasoning process, there is incorporation of clues from the video, image, or audio.

Reflection and Confirmation (1 point): The reasoning involves reflection or second confirmation of choices or answers, including revisiting video, image, or audio evidence.

Logical Reasoning (1 point): The thought process is clear, deriving conclusions through rigorous logical reasoning, analysis, or extension without additional assumptions or contradictions.

Problem Analysis (1 point): The reasoning process includes thorough analysis in conjunction with the problem at hand.

Overall Consistency (1 point): The reasoning text is based on visual or audio evidence and context information, presenting no extra assumptions or contradictions.

Assign one point for each criterion that is met, for a total possible score of five points. Verify that each criterion is addressed and reflect this in your scoring.

context: {reference}
reasoning path: {hypothesis}

only return the score number:
)__";

constexpr std::string_view kSystemPrompt =
    R"__(You are a helpful assistant. Your primary goal is to deeply analyze and interpret information from various available modalities (image, video, audio, text context) to answer questions with human-like depth and a clear, traceable thought process.

Begin by thoroughly understanding the image, video, audio, or other available context information, and then proceed with an in-depth analysis related to the question.

In reasoning, it is encouraged to incorporate self-reflection and verification into your reasoning process. You are encouraged to review the image, video, audio, or other context information to ensure the answer accuracy.

Provide your understanding of the image, video, and audio between the <context> </context> tags, detail the reasoning between the <think> </think> tags, and then give your final answer between the <answer> </answer> tags.
)__";

void replace_all(std::string& text, std::string_view placeholder,
                 std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
}

}  // namespace

std::string_view rubric_name(Rubric rubric) {
  switch (rubric) {
    case Rubric::context_coverage:
      return "context_coverage";
    case Rubric::logical_quality:
      return "logical_quality";
    case Rubric::open_similarity:
      return "open_similarity";
  }
  return "";
}

Rubric rubric_from_name(std::string_view name) {
  if (name == "context_coverage") return Rubric::context_coverage;
  if (name == "logical_quality") return Rubric::logical_quality;
  if (name == "open_similarity") return Rubric::open_similarity;
  throw DataError("unknown rubric '" + std::string(name) + "'");
}

std::string_view prompt_template(Rubric rubric) {
  switch (rubric) {
    case Rubric::logical_quality:
      return kLogicalRubricTemplate;
    case Rubric::context_coverage:
    case Rubric::open_similarity:
      // Open-ended similarity reuses the coverage rubric family.
      return kContextCoverageTemplate;
  }
  return {};
}

std::string_view system_prompt() { return kSystemPrompt; }

std::string render_prompt(Rubric rubric, std::string_view reference,
                          std::string_view hypothesis) {
  std::string out(prompt_template(rubric));
  replace_all(out, "{reference}", reference);
  replace_all(out, "{hypothesis}", hypothesis);
  return out;
}

}  // namespace segrpo
