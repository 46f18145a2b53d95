// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <unordered_map>

#include "segrpo/errors.hpp"
#include "segrpo/eval.hpp"
#include "segrpo/rng.hpp"
#include "segrpo/tasks.hpp"

namespace segrpo {

namespace fs = std::filesystem;

namespace {

RewardMapping mapping_from_json(const nlohmann::json& section,
                                const char* mode_key, const char* tau_key,
                                RewardMapping fallback) {
  RewardMapping mapping = fallback;
  if (section.contains(mode_key)) {
    std::string mode = section[mode_key].get<std::string>();
    if (mode == "scaled") {
      mapping.mode = RewardMapping::Mode::scaled;
    } else if (mode == "threshold") {
      mapping.mode = RewardMapping::Mode::threshold;
    } else {
      throw ConfigError("unknown judge mapping mode '" + mode + "'");
    }
  }
  if (section.contains(tau_key)) {
    mapping.tau = section[tau_key].get<int>();
    if (mapping.tau < 0 || mapping.tau > 5) {
      throw ConfigError("judge threshold tau must be in [0,5]");
    }
  }
  return mapping;
}

void check_known_keys(const nlohmann::json& j,
                      std::initializer_list<std::string_view> known,
                      const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + where + key + "'");
    }
  }
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  check_known_keys(j,
                   {"train", "judge", "dataset", "policy", "output_dir",
                    "log_verbosity", "deterministic_log", "workers"},
                   "");

  RunConfig cfg;
  if (j.contains("train")) {
    const auto& t = j["train"];
    check_known_keys(
        t,
        {"epsilon", "beta1", "beta2", "schedule_steps", "group_size",
         "learning_rate", "max_completion_tokens", "judge_mapping",
         "judge_tau", "open_mapping", "open_tau", "filter_low", "filter_high",
         "seed", "stage", "total_steps"},
        "train.");
    cfg.train.epsilon = t.value("epsilon", cfg.train.epsilon);
    cfg.train.beta1 = t.value("beta1", cfg.train.beta1);
    cfg.train.beta2 = t.value("beta2", cfg.train.beta2);
    cfg.train.schedule_steps =
        t.value("schedule_steps", static_cast<std::int64_t>(0));
    cfg.train.group_size = t.value("group_size", cfg.train.group_size);
    cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
    cfg.train.max_completion_tokens =
        t.value("max_completion_tokens", cfg.train.max_completion_tokens);
    cfg.train.judge_mapping = mapping_from_json(
        t, "judge_mapping", "judge_tau", RewardMapping::threshold(4));
    cfg.train.open_mapping =
        mapping_from_json(t, "open_mapping", "open_tau", RewardMapping::scaled());
    cfg.train.filter_low = t.value("filter_low", cfg.train.filter_low);
    cfg.train.filter_high = t.value("filter_high", cfg.train.filter_high);
    cfg.train.seed = t.value("seed", cfg.train.seed);
    cfg.stage = t.value("stage", cfg.stage);
    cfg.total_steps = t.value("total_steps", cfg.total_steps);
  } else {
    cfg.train.schedule_steps = 0;
  }

  if (j.contains("judge")) {
    const auto& sec = j["judge"];
    check_known_keys(sec,
                     {"backend", "endpoint", "path", "timeout_ms", "retries",
                      "backoff_ms", "concurrency", "credential_env"},
                     "judge.");
    cfg.judge.backend = sec.value("backend", cfg.judge.backend);
    cfg.judge.remote.endpoint = sec.value("endpoint", std::string());
    cfg.judge.remote.path = sec.value("path", cfg.judge.remote.path);
    cfg.judge.remote.timeout_ms =
        sec.value("timeout_ms", cfg.judge.remote.timeout_ms);
    cfg.judge.remote.retries = sec.value("retries", cfg.judge.remote.retries);
    cfg.judge.remote.backoff_base_ms =
        sec.value("backoff_ms", cfg.judge.remote.backoff_base_ms);
    cfg.judge.remote.max_in_flight =
        sec.value("concurrency", cfg.judge.remote.max_in_flight);
    cfg.judge.remote.credential_env =
        sec.value("credential_env", cfg.judge.remote.credential_env);
  }
  if (cfg.judge.backend != "mock" && cfg.judge.backend != "remote") {
    throw ConfigError("judge.backend must be 'mock' or 'remote'");
  }
  if (cfg.judge.backend == "remote" && cfg.judge.remote.endpoint.empty()) {
    throw ConfigError("judge.backend 'remote' requires judge.endpoint");
  }

  if (j.contains("dataset")) {
    const auto& sec = j["dataset"];
    check_known_keys(sec, {"kind", "count", "path"}, "dataset.");
    cfg.dataset.kind = sec.value("kind", cfg.dataset.kind);
    cfg.dataset.count = sec.value("count", cfg.dataset.count);
    cfg.dataset.path = sec.value("path", cfg.dataset.path);
  }
  if (cfg.dataset.kind != "tag_echo" && cfg.dataset.kind != "jsonl") {
    throw ConfigError("dataset.kind must be 'tag_echo' or 'jsonl'");
  }

  if (j.contains("policy")) {
    const auto& sec = j["policy"];
    check_known_keys(
        sec, {"context_window", "temperature", "cold_start_bias", "checkpoint"},
        "policy.");
    cfg.policy.context_window =
        sec.value("context_window", cfg.policy.context_window);
    cfg.policy.temperature = sec.value("temperature", cfg.policy.temperature);
    cfg.policy.cold_start_bias =
        sec.value("cold_start_bias", cfg.policy.cold_start_bias);
    cfg.policy.checkpoint = sec.value("checkpoint", cfg.policy.checkpoint);
  }

  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.log_verbosity = j.value("log_verbosity", cfg.log_verbosity);
  cfg.deterministic_log = j.value("deterministic_log", cfg.deterministic_log);
  cfg.workers = j.value("workers", cfg.workers);
  if (cfg.workers < 1) {
    throw ConfigError("workers must be >= 1");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path,
                          std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " +
                      e.what());
  }

  for (const std::string& ov : overrides) {
    std::size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + ov + "' must look like path.to.key=value");
    }
    std::string dotted = ov.substr(0, eq);
    std::string value = ov.substr(eq + 1);
    std::string pointer = "/";
    for (char c : dotted) {
      pointer += c == '.' ? '/' : c;
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
      parsed = value;  // plain string
    }
    doc[nlohmann::json::json_pointer(pointer)] = parsed;
  }
  return RunConfig::from_json(doc);
}

std::shared_ptr<const JudgeInterface> make_judge(const JudgeSettings& settings) {
  if (settings.backend == "mock") {
    return std::make_shared<MockJudge>();
  }
  return std::make_shared<RemoteJudge>(settings.remote);
}

namespace {

// Dataset records reuse the tag-echo skeleton for cold-start format biasing;
// only the prompt identity and gold label differ.
SyntheticTask task_from_record(const SampleRecord& rec, int prompt_id) {
  SyntheticTask task = make_tag_echo_task(0);
  task.prompt_id = prompt_id;
  task.question_id = rec.id;
  task.prompt = rec.prompt;
  task.gold = rec.gold;
  task.reference_context = rec.reference_context.value_or(std::string());
  return task;
}

std::vector<SyntheticTask> build_tasks(const RunConfig& cfg,
                                       const std::string& stage) {
  if (cfg.dataset.kind == "tag_echo") {
    if (cfg.dataset.count < 1) {
      throw ConfigError("dataset.count must be >= 1");
    }
    return make_tag_echo_suite(cfg.dataset.count, cfg.train.seed);
  }
  std::vector<SampleRecord> records = load_dataset(cfg.dataset.path);
  std::vector<SyntheticTask> tasks;
  int next_id = 0;
  for (const SampleRecord& rec : records) {
    if (rec.stage_tags.count(stage)) {
      tasks.push_back(task_from_record(rec, next_id++));
    }
  }
  if (tasks.empty()) {
    throw DataError("no records tagged '" + stage + "' in " +
                    cfg.dataset.path);
  }
  return tasks;
}

ToyPolicy build_policy(const RunConfig& cfg,
                       std::span<const SyntheticTask> tasks) {
  if (!cfg.policy.checkpoint.empty()) {
    std::ifstream in(cfg.policy.checkpoint);
    if (!in) {
      throw ConfigError("cannot open policy checkpoint '" +
                        cfg.policy.checkpoint + "'");
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError("policy checkpoint is not valid JSON: " +
                      std::string(e.what()));
    }
    return ToyPolicy::from_json(j);
  }
  return make_cold_start_policy(tasks, cfg.policy.context_window,
                                cfg.policy.cold_start_bias);
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write '" + path.string() + "'");
  }
  out << content;
}

}  // namespace

int cmd_train(const TrainArgs& args) {
  RunConfig cfg = load_run_config(args.config_path, args.overrides);
  if (args.stage) cfg.stage = *args.stage;
  if (args.steps) cfg.total_steps = *args.steps;
  if (args.seed) cfg.train.seed = *args.seed;
  if (cfg.total_steps < 0) {
    throw ConfigError("steps must be >= 0");
  }

  // Everything is validated and constructed before any output is written.
  StreamSet streams = stage_config(cfg.stage);
  if (cfg.train.schedule_steps <= 0) {
    cfg.train.schedule_steps = std::max<std::int64_t>(1, cfg.total_steps / 2);
  }
  cfg.train.validate();
  std::vector<SyntheticTask> tasks = build_tasks(cfg, cfg.stage);
  ToyPolicy policy = build_policy(cfg, tasks);
  std::shared_ptr<const JudgeInterface> judge = make_judge(cfg.judge);
  Trainer trainer(std::move(policy), std::move(tasks), judge, cfg.train,
                  streams, cfg.workers);

  fs::create_directories(cfg.output_dir);
  fs::path log_path = fs::path(cfg.output_dir) / "training_log.jsonl";
  std::ofstream log(log_path);
  if (!log) {
    throw DataError("cannot write training log '" + log_path.string() + "'");
  }

  const bool chatty = cfg.log_verbosity != "quiet";
  std::vector<StepReport> reports;
  reports.reserve(static_cast<std::size_t>(cfg.total_steps));
  for (std::int64_t k = 0; k < cfg.total_steps; ++k) {
    StepReport report = trainer.train_step(k);
    if (cfg.deterministic_log) {
      report.wall_ms = 0.0;
    }
    log << report.to_json().dump() << '\n';
    if (chatty && (k % 100 == 0 || k + 1 == cfg.total_steps)) {
      std::cerr << "step " << k << " objective " << report.objective
                << " r_f " << (report.mean_r_f ? *report.mean_r_f : 0.0)
                << " r_a " << (report.mean_r_a ? *report.mean_r_a : 0.0)
                << '\n';
    }
    reports.push_back(std::move(report));
  }
  log.close();

  fs::path ckpt_path = fs::path(cfg.output_dir) / "checkpoint_final.json";
  write_text_file(ckpt_path, trainer.policy().to_json().dump() + "\n");

  auto window_mean = [&](auto member, bool front) -> nlohmann::json {
    std::size_t w = std::min<std::size_t>(25, reports.size());
    if (w == 0) {
      return nullptr;
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < w; ++i) {
      std::size_t idx = front ? i : reports.size() - 1 - i;
      const auto& v = reports[idx].*member;
      if (v) {
        sum += *v;
        ++count;
      }
    }
    return count == 0 ? nlohmann::json(nullptr)
                      : nlohmann::json(sum / static_cast<double>(count));
  };
  nlohmann::json summary = {
      {"steps", cfg.total_steps},
      {"stage", cfg.stage},
      {"seed", cfg.train.seed},
      {"schedule_steps", cfg.train.schedule_steps},
      {"initial",
       {{"mean_r_f", window_mean(&StepReport::mean_r_f, true)},
        {"mean_r_a", window_mean(&StepReport::mean_r_a, true)},
        {"mean_r_c", window_mean(&StepReport::mean_r_c, true)},
        {"mean_r_l", window_mean(&StepReport::mean_r_l, true)}}},
      {"final",
       {{"mean_r_f", window_mean(&StepReport::mean_r_f, false)},
        {"mean_r_a", window_mean(&StepReport::mean_r_a, false)},
        {"mean_r_c", window_mean(&StepReport::mean_r_c, false)},
        {"mean_r_l", window_mean(&StepReport::mean_r_l, false)}}},
  };
  write_text_file(fs::path(cfg.output_dir) / "summary.json",
                  summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_filter(const FilterArgs& args) {
  RunConfig cfg = load_run_config(args.config_path, args.overrides);
  double low = args.low.value_or(cfg.train.filter_low);
  double high = args.high.value_or(cfg.train.filter_high);

  std::vector<SampleRecord> records = load_dataset(args.input_path);
  std::shared_ptr<const JudgeInterface> judge = make_judge(cfg.judge);

  // Prompt identity keys off the record id so filtering a subset replays the
  // same rollouts record by record.
  std::vector<SyntheticTask> tasks;
  tasks.reserve(records.size());
  for (const SampleRecord& rec : records) {
    tasks.push_back(task_from_record(
        rec, static_cast<int>(hash_str(rec.id) & 0x7fffffff)));
  }
  ToyPolicy policy = build_policy(cfg, tasks);

  std::unordered_map<std::string, int> prompt_ids;
  for (const SyntheticTask& task : tasks) {
    prompt_ids.emplace(task.question_id, task.prompt_id);
  }
  RolloutFn rollout = [&](const SampleRecord& rec, int /*i*/,
                          std::uint64_t seed) {
    std::vector<int> tokens = policy.sample_completion(
        prompt_ids.at(rec.id), cfg.train.max_completion_tokens, seed);
    return policy.detokenize(tokens);
  };

  std::vector<FilteredRecord> retained = difficulty_filter(
      rollout, records, cfg.train.group_size, low, high, cfg.train.seed,
      *judge);
  save_filtered(args.output_path, retained);
  std::cout << "retained " << retained.size() << " dropped "
            << records.size() - retained.size() << '\n';
  return kExitOk;
}

int cmd_eval(const EvalArgs& args) {
  std::vector<SampleRecord> gold = load_dataset(args.gold_path);
  std::vector<PredictionRecord> preds = load_predictions(args.pred_path);
  ScoreOptions options;
  options.missing_as_zero = args.allow_missing;
  ScoreReport report = score_benchmark(preds, gold, options);
  if (!args.report_path.empty()) {
    write_text_file(args.report_path, report.to_json().dump(2) + "\n");
  }
  std::cout << report.aggregate << '\n';
  return kExitOk;
}

int run_guarded(const std::function<int()>& fn) {
  auto emit = [](const char* kind, const std::string& message, int code) {
    nlohmann::json err = {
        {"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    std::cerr << err.dump() << '\n';
    return code;
  };
  try {
    return fn();
  } catch (const ConfigError& e) {
    return emit("config", e.what(), kExitConfig);
  } catch (const JudgeError& e) {
    return emit("judge", e.what(), kExitJudge);
  } catch (const DataError& e) {
    return emit("data", e.what(), kExitData);
  } catch (const std::exception& e) {
    return emit("internal", e.what(), kExitConfig);
  }
}

}  // namespace segrpo
