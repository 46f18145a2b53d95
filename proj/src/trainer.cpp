// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <thread>

#include "segrpo/errors.hpp"
#include "segrpo/rng.hpp"

namespace segrpo {

void TrainConfig::validate() const {
  if (!(epsilon > 0.0)) {
    throw ConfigError("epsilon must be > 0");
  }
  if (!(beta1 >= beta2 && beta2 >= 0.0)) {
    throw ConfigError("need beta1 >= beta2 >= 0");
  }
  if (schedule_steps < 1) {
    throw ConfigError("schedule_steps must be >= 1");
  }
  if (group_size < 2) {
    throw ConfigError("group_size must be >= 2");
  }
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw ConfigError("learning_rate must be finite and >= 0");
  }
  if (max_completion_tokens < 1) {
    throw ConfigError("max_completion_tokens must be >= 1");
  }
  if (!(0.0 <= filter_low && filter_low < filter_high && filter_high <= 1.0)) {
    throw ConfigError("need 0 <= filter_low < filter_high <= 1");
  }
}

nlohmann::json StepReport::to_json() const {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return nlohmann::json{
      {"step", step},          {"objective", objective},
      {"beta_hat", beta_hat},  {"mean_r_f", opt(mean_r_f)},
      {"mean_r_a", opt(mean_r_a)}, {"mean_r_c", opt(mean_r_c)},
      {"mean_r_l", opt(mean_r_l)}, {"grad_norm", grad_norm},
      {"wall_ms", wall_ms},
  };
}

Trainer::Trainer(ToyPolicy policy, std::vector<SyntheticTask> tasks,
                 std::shared_ptr<const JudgeInterface> judge,
                 TrainConfig config, StreamSet streams, int workers)
    : policy_(std::move(policy)),
      reference_(policy_),
      tasks_(std::move(tasks)),
      judge_(std::move(judge)),
      config_(config),
      streams_(streams),
      workers_(std::max(1, workers)) {
  config_.validate();
  if (tasks_.empty()) {
    throw ConfigError("trainer needs at least one task");
  }
  if (!judge_) {
    throw ConfigError("trainer needs a judge");
  }
  if (streams_.context) {
    for (const SyntheticTask& task : tasks_) {
      if (task.reference_context.empty()) {
        throw DataError("context reward enabled but task '" +
                        task.question_id + "' has no reference context");
      }
    }
  }
}

RewardVector Trainer::compute_rewards(const std::string& text,
                                      const SyntheticTask& task) const {
  ParseResult parsed = parse_tagged_response(text);
  const TaggedResponse* resp = std::get_if<TaggedResponse>(&parsed);

  RewardVector rv;
  if (streams_.format) {
    rv.format = resp ? 1.0 : 0.0;
  }
  if (streams_.accuracy) {
    // Accuracy reads the answer segment when one exists, even in otherwise
    // malformed completions; with no answer block it is 0.
    std::optional<std::string> answer =
        resp ? std::optional<std::string>(resp->answer_text)
             : find_block(text, Tag::answer);
    rv.accuracy = answer ? accuracy_reward(*answer, task.gold, *judge_,
                                           config_.open_mapping)
                         : 0.0;
  }
  if (streams_.context || streams_.logical) {
    std::string gen_context =
        resp ? resp->context_text
             : find_block(text, Tag::context).value_or(std::string());
    if (streams_.context) {
      rv.context = context_reward(*judge_, gen_context, task.reference_context,
                                  config_.judge_mapping);
    }
    if (streams_.logical) {
      std::string think =
          resp ? resp->think_text
               : find_block(text, Tag::think).value_or(std::string());
      rv.logical =
          logical_reward(*judge_, gen_context, think, config_.judge_mapping);
    }
  }
  return rv;
}

Trainer::BuiltGroup Trainer::build_group(const SyntheticTask& task,
                                         std::int64_t k) const {
  BuiltGroup built;
  RolloutGroup& group = built.group;
  group.question_id = task.question_id;
  group.prompt_id = task.prompt_id;

  for (int i = 0; i < config_.group_size; ++i) {
    std::uint64_t seed = derive_seed(config_.seed, "rollout",
                                     static_cast<std::uint64_t>(k),
                                     task.prompt_id, i);
    std::vector<int> tokens = policy_.sample_completion(
        task.prompt_id, config_.max_completion_tokens, seed);
    if (tokens.empty()) {
      std::cerr << "warning: dropping zero-token completion for '"
                << task.question_id << "'\n";
      continue;
    }
    std::string text = policy_.detokenize(tokens);

    ParseResult parsed = parse_tagged_response(text);
    SegmentMask mask;
    if (const auto* resp = std::get_if<TaggedResponse>(&parsed)) {
      mask = segment_token_spans(*resp, policy_.token_char_offsets(tokens));
    } else {
      mask = SegmentMask::unsegmented(tokens.size());
    }

    group.logp_old.push_back(policy_.log_probs(task.prompt_id, tokens));
    group.logp_ref.push_back(reference_.log_probs(task.prompt_id, tokens));
    group.masks.push_back(std::move(mask));
    group.rewards.push_back(compute_rewards(text, task));
    group.completions.push_back(std::move(tokens));
    built.texts.push_back(std::move(text));
  }
  group.validate();
  return built;
}

StepReport Trainer::train_step(std::int64_t k) {
  auto t0 = std::chrono::steady_clock::now();

  std::vector<BuiltGroup> built(tasks_.size());
  if (workers_ <= 1 || tasks_.size() <= 1) {
    for (std::size_t q = 0; q < tasks_.size(); ++q) {
      built[q] = build_group(tasks_[q], k);
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    int nthreads = std::min<int>(workers_, static_cast<int>(tasks_.size()));
    for (int w = 0; w < nthreads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t q = next.fetch_add(1); q < tasks_.size();
             q = next.fetch_add(1)) {
          built[q] = build_group(tasks_[q], k);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  if (hook_) {
    for (std::size_t q = 0; q < tasks_.size(); ++q) {
      for (std::size_t i = 0; i < built[q].texts.size(); ++i) {
        hook_(k, tasks_[q], built[q].texts[i], built[q].group.rewards[i]);
      }
    }
  }

  std::vector<RolloutGroup> groups;
  groups.reserve(built.size());
  for (auto& b : built) {
    groups.push_back(std::move(b.group));
  }

  std::vector<AdvantageField> advantages;
  advantages.reserve(groups.size());
  for (const RolloutGroup& group : groups) {
    advantages.push_back(masked_advantage_field(group, streams_));
  }

  // pi_old equals the pre-step policy, so logp_theta initially coincides
  // with logp_old; it is still recomputed through the policy for clarity.
  LogpBatch logp_theta(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& completion : groups[g].completions) {
      logp_theta[g].push_back(
          policy_.log_probs(groups[g].prompt_id, completion));
    }
  }

  const double beta_hat =
      beta_schedule(k, config_.schedule_steps, config_.beta1, config_.beta2);
  GrpoLoss loss =
      grpo_loss(groups, advantages, logp_theta, config_.epsilon, beta_hat);

  ToyPolicy::ParamTable grad;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i = 0; i < groups[g].completions.size(); ++i) {
      policy_.accumulate_weighted_logp_grad(groups[g].prompt_id,
                                            groups[g].completions[i],
                                            loss.d_logp[g][i], grad);
    }
  }
  policy_.apply_gradient(grad, config_.learning_rate);

  StepReport report;
  report.step = k;
  report.objective = loss.objective;
  report.beta_hat = beta_hat;
  report.grad_norm = param_table_norm(grad);

  auto mean_of = [&](auto member) -> std::optional<double> {
    double sum = 0.0;
    std::size_t count = 0;
    for (const RolloutGroup& group : groups) {
      for (const RewardVector& rv : group.rewards) {
        const auto& v = rv.*member;
        if (v) {
          sum += *v;
          ++count;
        }
      }
    }
    if (count == 0) {
      return std::nullopt;
    }
    return sum / static_cast<double>(count);
  };
  if (streams_.format) report.mean_r_f = mean_of(&RewardVector::format);
  if (streams_.accuracy) report.mean_r_a = mean_of(&RewardVector::accuracy);
  if (streams_.context) report.mean_r_c = mean_of(&RewardVector::context);
  if (streams_.logical) report.mean_r_l = mean_of(&RewardVector::logical);

  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return report;
}

}  // namespace segrpo
