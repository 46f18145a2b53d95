// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0
//
// segrpo CLI: train (segment-masked GRPO on the toy policy), filter
// (rollout-accuracy difficulty filter), eval (benchmark scorer).

#include <string>
#include <vector>

#include "CLI11.hpp"
#include "segrpo/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"segment-masked GRPO training engine"};
  app.require_subcommand(1);

  segrpo::TrainArgs train_args;
  std::string train_stage;
  std::int64_t train_steps = -1;
  std::int64_t train_seed = -1;
  auto* train = app.add_subcommand("train", "run RL training");
  train->add_option("--config", train_args.config_path, "run config JSON")
      ->required();
  train->add_option("--stage", train_stage, "rl_stage1 or rl_stage2");
  train->add_option("--steps", train_steps, "number of training steps");
  train->add_option("--seed", train_seed, "root random seed");
  train->add_option("--set", train_args.overrides,
                    "config override path.to.key=value (repeatable)");

  segrpo::FilterArgs filter_args;
  auto* filter = app.add_subcommand("filter", "difficulty-filter a dataset");
  filter->add_option("--config", filter_args.config_path, "run config JSON")
      ->required();
  filter->add_option("--in", filter_args.input_path, "input dataset JSONL")
      ->required();
  filter->add_option("--out", filter_args.output_path, "output dataset JSONL")
      ->required();
  double low = -1.0, high = -1.0;
  filter->add_option("--low", low, "lower accuracy bound (strict)");
  filter->add_option("--high", high, "upper accuracy bound (strict)");
  filter->add_option("--set", filter_args.overrides,
                     "config override path.to.key=value (repeatable)");

  segrpo::EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score predictions against gold");
  eval->add_option("--pred", eval_args.pred_path, "predictions JSONL")
      ->required();
  eval->add_option("--gold", eval_args.gold_path, "gold dataset JSONL")
      ->required();
  eval->add_option("--report", eval_args.report_path, "score report JSON");
  eval->add_flag("--allow-missing", eval_args.allow_missing,
                 "score missing predictions as 0 instead of failing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : segrpo::kExitConfig;
  }

  if (train->parsed()) {
    if (!train_stage.empty()) train_args.stage = train_stage;
    if (train_steps >= 0) train_args.steps = train_steps;
    if (train_seed >= 0) {
      train_args.seed = static_cast<std::uint64_t>(train_seed);
    }
    return segrpo::run_guarded([&] { return segrpo::cmd_train(train_args); });
  }
  if (filter->parsed()) {
    if (low >= 0.0) filter_args.low = low;
    if (high >= 0.0) filter_args.high = high;
    return segrpo::run_guarded([&] { return segrpo::cmd_filter(filter_args); });
  }
  return segrpo::run_guarded([&] { return segrpo::cmd_eval(eval_args); });
}
