// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "segrpo/judge_types.hpp"

namespace segrpo {

// How a 0-5 judge score becomes a reward in [0, 1].
struct RewardMapping {
  enum class Mode { scaled, threshold };

  Mode mode = Mode::threshold;
  int tau = 4;  // threshold mode only

  static RewardMapping scaled() { return {Mode::scaled, 0}; }
  static RewardMapping threshold(int tau) { return {Mode::threshold, tau}; }
};

// scaled -> raw_score / 5; threshold(tau) -> 1 iff raw_score >= tau.
double judge_score_to_reward(const JudgeScore& score,
                             const RewardMapping& mapping);

// Scoring backend. Implementations must be safe to share across rollout
// workers. `reference` and `hypothesis` fill the rubric template slots:
// for logical_quality the reference is the generated context and the
// hypothesis is the reasoning path.
class JudgeInterface {
 public:
  virtual ~JudgeInterface() = default;
  virtual JudgeScore evaluate(Rubric rubric, std::string_view reference,
                              std::string_view hypothesis) const = 0;
};

// Deterministic heuristic judge used by all tests and the default training
// setup. Coverage rubrics score distinct-word recall of the reference mapped
// onto the rubric's {5,4,2,1,0} levels; the logical rubric awards one point
// per criterion from keyword checks. Counts evaluate() calls so tests can
// assert a stage never consulted the judge.
class MockJudge : public JudgeInterface {
 public:
  JudgeScore evaluate(Rubric rubric, std::string_view reference,
                      std::string_view hypothesis) const override;

  std::uint64_t call_count() const {
    return calls_.load(std::memory_order_relaxed);
  }

 private:
  mutable std::atomic<std::uint64_t> calls_{0};
};

struct RemoteJudgeConfig {
  std::string endpoint;        // e.g. "http://127.0.0.1:8700"
  std::string path = "/score";
  int timeout_ms = 10000;
  int retries = 3;             // retries after the first attempt
  int backoff_base_ms = 100;   // doubled per retry
  int max_in_flight = 4;
  std::string credential_env = "SEGRPO_JUDGE_TOKEN";
};

// Wire client for an external judge service.
// Request:  POST <path> {"rubric": str, "reference": str, "hypothesis": str}
// Response: {"score": int in [0,5]}
// Transport failures retry with exponential backoff and end in
// JudgeUnavailable; replies that never parse to an in-range integer end in
// MalformedJudgeReply. In-flight requests are bounded by max_in_flight.
class RemoteJudge : public JudgeInterface {
 public:
  explicit RemoteJudge(RemoteJudgeConfig config);
  ~RemoteJudge() override;

  JudgeScore evaluate(Rubric rubric, std::string_view reference,
                      std::string_view hypothesis) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace segrpo
