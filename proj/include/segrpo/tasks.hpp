// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "segrpo/rewards.hpp"
#include "segrpo/toy_policy.hpp"

namespace segrpo {

// A desk-scale training unit: a prompt the toy policy can condition on, a
// gold label, a reference context for the context reward, and one response
// that earns full reward.
struct SyntheticTask {
  int prompt_id = 0;
  std::string question_id;
  std::string prompt;
  GoldSpec gold = GoldSpec::mc_single('A');
  std::string reference_context;
  std::string target_response;
  std::vector<std::string> target_token_strings;  // includes the end token
};

// Vocabulary shared by the tag-echo task family: one token per tag
// delimiter, the option letters, and a handful of filler words, so the
// format is learnable within a few dozen tokens.
std::vector<std::string> tag_echo_vocab();

// A task whose gold answer is a single option letter embedded in the prompt.
// The reference context restates the prompt facts; the target response uses
// the three-tag format and earns full format/accuracy/context/logical reward
// under the MockJudge with threshold 4.
SyntheticTask make_tag_echo_task(std::uint64_t seed);

// `count` tasks with prompt ids 0..count-1, seeded from `seed`.
std::vector<SyntheticTask> make_tag_echo_suite(int count, std::uint64_t seed);

// Policy initialized with a logit bias along each task's target skeleton,
// except that the answer-letter choice is spread evenly over all option
// letters. This mimics a format-following but not-yet-accurate starting
// point for RL.
ToyPolicy make_cold_start_policy(std::span<const SyntheticTask> tasks,
                                 int context_window, double bias);

}  // namespace segrpo
