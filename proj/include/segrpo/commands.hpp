// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "segrpo/dataset.hpp"
#include "segrpo/judge.hpp"
#include "segrpo/trainer.hpp"

namespace segrpo {

struct JudgeSettings {
  std::string backend = "mock";  // "mock" | "remote"
  RemoteJudgeConfig remote;
};

struct DatasetSettings {
  std::string kind = "tag_echo";  // "tag_echo" | "jsonl"
  int count = 8;                  // tag_echo task count
  std::string path;               // jsonl path
};

struct PolicySettings {
  int context_window = 1;
  double temperature = 1.0;
  double cold_start_bias = 5.0;
  std::string checkpoint;  // optional; overrides cold-start init
};

// Full run configuration: a JSON document, where command-line flags override
// fields one-for-one via dotted paths (e.g. train.learning_rate=2).
struct RunConfig {
  TrainConfig train;
  std::string stage = "rl_stage1";
  std::int64_t total_steps = 500;
  JudgeSettings judge;
  DatasetSettings dataset;
  PolicySettings policy;
  std::string output_dir = "out";
  std::string log_verbosity = "info";
  bool deterministic_log = false;  // write wall_ms as 0 for reproducible logs
  int workers = 1;

  static RunConfig from_json(const nlohmann::json& j);
};

// Loads the config file and applies "dotted.path=value" overrides; values
// parse as JSON when possible, else as strings.
RunConfig load_run_config(const std::string& path,
                          std::span<const std::string> overrides);

std::shared_ptr<const JudgeInterface> make_judge(const JudgeSettings& settings);

// Exit codes: 0 success, 1 usage/config, 2 data, 3 judge backend.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitJudge = 3;

struct TrainArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> stage;
  std::optional<std::int64_t> steps;
  std::optional<std::uint64_t> seed;
};
int cmd_train(const TrainArgs& args);

struct FilterArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string input_path;
  std::string output_path;
  std::optional<double> low;
  std::optional<double> high;
};
int cmd_filter(const FilterArgs& args);

struct EvalArgs {
  std::string pred_path;
  std::string gold_path;
  std::string report_path;
  bool allow_missing = false;
};
int cmd_eval(const EvalArgs& args);

// Runs fn, mapping library errors to exit codes and emitting a
// machine-readable error record on stderr.
int run_guarded(const std::function<int()>& fn);

}  // namespace segrpo
