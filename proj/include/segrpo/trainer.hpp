// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "segrpo/grpo.hpp"
#include "segrpo/judge.hpp"
#include "segrpo/tasks.hpp"
#include "segrpo/toy_policy.hpp"

namespace segrpo {

// Optimizer and recipe hyperparameters for one run.
struct TrainConfig {
  double epsilon = 0.2;           // clip range
  double beta1 = 0.04;            // KL coefficient at step 0
  double beta2 = 0.01;            // KL coefficient after step S
  std::int64_t schedule_steps = 1;  // S; callers resolve 'half of total steps'
  int group_size = 8;             // G completions per question
  double learning_rate = 1e-6;
  int max_completion_tokens = 2048;
  RewardMapping judge_mapping = RewardMapping::threshold(4);  // r_c, r_l
  RewardMapping open_mapping = RewardMapping::scaled();       // open-ended r_a
  double filter_low = 0.0;
  double filter_high = 0.75;
  std::uint64_t seed = 0;

  void validate() const;
};

struct StepReport {
  std::int64_t step = 0;
  double objective = 0.0;
  double beta_hat = 0.0;
  double grad_norm = 0.0;
  std::optional<double> mean_r_f;
  std::optional<double> mean_r_a;
  std::optional<double> mean_r_c;
  std::optional<double> mean_r_l;
  double wall_ms = 0.0;

  nlohmann::json to_json() const;
};

// One-update-per-batch GRPO trainer over a fixed task set. pi_old is the
// pre-step policy (no inner PPO epochs); pi_ref is the snapshot taken at
// construction. Rollouts and rewards for distinct questions may run on
// worker threads; advantage construction and the parameter update are
// serialized, and all results are reduced in task order so runs are
// deterministic for a given seed regardless of scheduling.
class Trainer {
 public:
  Trainer(ToyPolicy policy, std::vector<SyntheticTask> tasks,
          std::shared_ptr<const JudgeInterface> judge, TrainConfig config,
          StreamSet streams, int workers = 1);

  StepReport train_step(std::int64_t k);

  const ToyPolicy& policy() const { return policy_; }
  const ToyPolicy& reference_policy() const { return reference_; }
  const std::vector<SyntheticTask>& tasks() const { return tasks_; }

  // Observes every sampled completion with its rewards, in deterministic
  // (task, completion) order.
  using CompletionHook =
      std::function<void(std::int64_t step, const SyntheticTask& task,
                         const std::string& text, const RewardVector& rewards)>;
  void set_completion_hook(CompletionHook hook) { hook_ = std::move(hook); }

  RewardVector compute_rewards(const std::string& text,
                               const SyntheticTask& task) const;

 private:
  struct BuiltGroup {
    RolloutGroup group;
    std::vector<std::string> texts;
  };
  BuiltGroup build_group(const SyntheticTask& task, std::int64_t k) const;

  ToyPolicy policy_;
  ToyPolicy reference_;
  std::vector<SyntheticTask> tasks_;
  std::shared_ptr<const JudgeInterface> judge_;
  TrainConfig config_;
  StreamSet streams_;
  int workers_ = 1;
  CompletionHook hook_;
};

}  // namespace segrpo
