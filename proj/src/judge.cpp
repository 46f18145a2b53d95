// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/judge.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "segrpo/errors.hpp"

namespace segrpo {

double judge_score_to_reward(const JudgeScore& score,
                             const RewardMapping& mapping) {
  switch (mapping.mode) {
    case RewardMapping::Mode::scaled:
      return static_cast<double>(score.raw_score) / 5.0;
    case RewardMapping::Mode::threshold:
      return score.raw_score >= mapping.tau ? 1.0 : 0.0;
  }
  return 0.0;
}

namespace {

std::vector<std::string> words_lower(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) {
    out.push_back(std::move(cur));
  }
  return out;
}

std::set<std::string> word_set(std::string_view text) {
  auto words = words_lower(text);
  return {words.begin(), words.end()};
}

bool contains_any(const std::set<std::string>& words,
                  std::initializer_list<std::string_view> needles) {
  return std::any_of(needles.begin(), needles.end(), [&](std::string_view n) {
    return words.count(std::string(n)) > 0;
  });
}

// Distinct-word recall of the reference, mapped to the coverage rubric's
// score levels {5, 4, 2, 1, 0}.
int coverage_score(std::string_view reference, std::string_view hypothesis) {
  std::set<std::string> ref = word_set(reference);
  if (ref.empty()) {
    return 5;  // nothing to cover
  }
  std::set<std::string> hyp = word_set(hypothesis);
  std::size_t covered = 0;
  for (const auto& w : ref) {
    covered += hyp.count(w);
  }
  double frac = static_cast<double>(covered) / static_cast<double>(ref.size());
  if (frac >= 0.9) return 5;
  if (frac >= 0.6) return 4;
  if (frac >= 0.3) return 2;
  if (frac > 0.0) return 1;
  return 0;
}

// One point per rubric criterion, keyword-checked against the reasoning path.
int logical_score(std::string_view reference, std::string_view hypothesis) {
  std::set<std::string> hyp = word_set(hypothesis);
  if (hyp.empty()) {
    return 0;
  }
  std::set<std::string> ref = word_set(reference);

  bool shares_ref_word = false;
  for (const auto& w : ref) {
    if (w.size() >= 3 && hyp.count(w)) {
      shares_ref_word = true;
      break;
    }
  }

  // Integration of clues: cites a modality or reuses context vocabulary.
  bool integration =
      shares_ref_word ||
      contains_any(hyp, {"video", "image", "audio", "visual", "auditory"});
  bool reflection = contains_any(
      hyp, {"reflect", "reflecting", "recheck", "rechecked", "confirm",
            "confirming", "confirmed", "verify", "verifying", "verified",
            "review", "reviewing", "revisit", "revisiting"});
  bool logic = contains_any(hyp, {"because", "therefore", "thus", "hence",
                                  "since", "implies", "deduce", "deduced",
                                  "conclude", "concluding", "concluded"});
  bool analysis = contains_any(
      hyp, {"question", "problem", "task", "asks", "asked", "analyze",
            "analysis", "analyzing"});
  bool consistency =
      integration &&
      !contains_any(hyp, {"contradiction", "contradicts", "unrelated"});

  return static_cast<int>(integration) + static_cast<int>(reflection) +
         static_cast<int>(logic) + static_cast<int>(analysis) +
         static_cast<int>(consistency);
}

}  // namespace

JudgeScore MockJudge::evaluate(Rubric rubric, std::string_view reference,
                               std::string_view hypothesis) const {
  calls_.fetch_add(1, std::memory_order_relaxed);
  int score = 0;
  switch (rubric) {
    case Rubric::context_coverage:
    case Rubric::open_similarity:
      score = coverage_score(reference, hypothesis);
      break;
    case Rubric::logical_quality:
      score = logical_score(reference, hypothesis);
      break;
  }
  return JudgeScore{score, rubric};
}

struct RemoteJudge::Impl {
  RemoteJudgeConfig config;
  std::string host;
  mutable std::counting_semaphore<> in_flight;

  explicit Impl(RemoteJudgeConfig cfg)
      : config(std::move(cfg)),
        in_flight(std::max(1, config.max_in_flight)) {
    host = config.endpoint;
  }
};

RemoteJudge::RemoteJudge(RemoteJudgeConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {
  if (impl_->config.endpoint.empty()) {
    throw ConfigError("remote judge endpoint not configured");
  }
}

RemoteJudge::~RemoteJudge() = default;

JudgeScore RemoteJudge::evaluate(Rubric rubric, std::string_view reference,
                                 std::string_view hypothesis) const {
  nlohmann::json body = {
      {"rubric", rubric_name(rubric)},
      {"reference", std::string(reference)},
      {"hypothesis", std::string(hypothesis)},
  };
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* token = std::getenv(impl_->config.credential_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  impl_->in_flight.acquire();
  struct Release {
    std::counting_semaphore<>& sem;
    ~Release() { sem.release(); }
  } release{impl_->in_flight};

  bool last_failure_malformed = false;
  std::string last_detail = "no attempt made";
  const int attempts = std::max(0, impl_->config.retries) + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      auto delay = std::chrono::milliseconds(
          static_cast<long>(impl_->config.backoff_base_ms) << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }

    httplib::Client client(impl_->host);
    client.set_connection_timeout(0, impl_->config.timeout_ms * 1000L);
    client.set_read_timeout(0, impl_->config.timeout_ms * 1000L);
    client.set_write_timeout(0, impl_->config.timeout_ms * 1000L);

    auto res = client.Post(impl_->config.path, headers, payload,
                           "application/json");
    if (!res) {
      last_failure_malformed = false;
      last_detail = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_failure_malformed = false;
      last_detail = "HTTP status " + std::to_string(res->status);
      continue;
    }

    try {
      nlohmann::json reply = nlohmann::json::parse(res->body);
      if (!reply.contains("score") || !reply["score"].is_number_integer()) {
        throw MalformedJudgeReply("reply has no integer 'score' field");
      }
      int score = reply["score"].get<int>();
      if (score < 0 || score > 5) {
        throw MalformedJudgeReply("score " + std::to_string(score) +
                                  " outside [0,5]");
      }
      return JudgeScore{score, rubric};
    } catch (const MalformedJudgeReply& e) {
      last_failure_malformed = true;
      last_detail = e.what();
    } catch (const nlohmann::json::exception& e) {
      last_failure_malformed = true;
      last_detail = std::string("unparseable reply: ") + e.what();
    }
  }

  if (last_failure_malformed) {
    throw MalformedJudgeReply("judge reply malformed after " +
                              std::to_string(attempts) +
                              " attempts: " + last_detail);
  }
  throw JudgeUnavailable("judge unreachable after " +
                         std::to_string(attempts) +
                         " attempts: " + last_detail);
}

}  // namespace segrpo
