// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/tasks.hpp"

#include <random>
#include <set>
#include <utility>

#include "segrpo/rng.hpp"

namespace segrpo {

namespace {

constexpr char kLetters[] = {'A', 'B', 'C', 'D'};
constexpr int kNumLetters = 4;

}  // namespace

std::vector<std::string> tag_echo_vocab() {
  return {
      "<context>", "</context>", "<think>",   "</think>",  "<answer>",
      "</answer>", "<eos>",      " the",      " clue",     " letter",
      " is",       " A",         " B",        " C",        " D",
      " because",  " question",  " asks",     " audio",    " confirm",
  };
}

SyntheticTask make_tag_echo_task(std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  char letter = kLetters[rng() % kNumLetters];
  std::string letter_str(1, letter);

  SyntheticTask task;
  task.prompt_id = static_cast<int>(seed & 0x7fffffff);
  task.question_id = "tag-echo-" + std::to_string(seed);
  task.prompt =
      "The clue letter is " + letter_str + ". Which letter is the clue?";
  task.gold = GoldSpec::mc_single(letter);
  task.reference_context = "the clue letter is " + letter_str;
  task.target_token_strings = {
      "<context>", " the",      " clue",   " letter", " is",   "</context>",
      "<think>",   " because",  " question", " asks", " audio", " confirm",
      "</think>",  "<answer>",  " " + letter_str, "</answer>", "<eos>",
  };
  for (const auto& tok : task.target_token_strings) {
    if (tok != "<eos>") {
      task.target_response += tok;
    }
  }
  return task;
}

std::vector<SyntheticTask> make_tag_echo_suite(int count, std::uint64_t seed) {
  std::vector<SyntheticTask> tasks;
  tasks.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SyntheticTask task = make_tag_echo_task(derive_seed(seed, "task-gen", i));
    task.prompt_id = i;
    task.question_id = "echo-" + std::to_string(i);
    tasks.push_back(std::move(task));
  }
  return tasks;
}

ToyPolicy make_cold_start_policy(std::span<const SyntheticTask> tasks,
                                 int context_window, double bias) {
  ToyPolicy policy(tag_echo_vocab(), context_window);

  for (const SyntheticTask& task : tasks) {
    // One skeleton variant per option letter; the (key, token) pairs are
    // deduplicated so the shared prefix is biased once and each letter gets
    // the same mass at the answer slot.
    std::set<std::pair<ToyPolicy::Key, int>> pairs;
    for (int li = 0; li < kNumLetters; ++li) {
      std::vector<int> tokens;
      tokens.reserve(task.target_token_strings.size());
      for (const std::string& tok : task.target_token_strings) {
        if (tok.size() == 2 && tok[0] == ' ' && tok[1] >= 'A' && tok[1] <= 'Z') {
          tokens.push_back(
              policy.token_id(std::string(" ") + kLetters[li]));
        } else {
          tokens.push_back(policy.token_id(tok));
        }
      }
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        pairs.emplace(policy.key_at(task.prompt_id, tokens, t), tokens[t]);
      }
    }
    for (const auto& [key, token] : pairs) {
      std::span<const int> prev(key.prev.data(),
                                static_cast<std::size_t>(context_window));
      policy.add_logit_bias(key.prompt_id, prev, token, bias);
    }
  }
  return policy;
}

}  // namespace segrpo
