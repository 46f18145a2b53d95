// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/judge.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "httplib.h"
#include "segrpo/errors.hpp"
#include "segrpo/prompts.hpp"
#include "segrpo/rewards.hpp"

using namespace segrpo;

TEST_CASE("score to reward mapping") {
  CHECK(judge_score_to_reward({5, Rubric::open_similarity},
                              RewardMapping::scaled()) == 1.0);
  CHECK(judge_score_to_reward({3, Rubric::logical_quality},
                              RewardMapping::scaled()) == 0.6);
  CHECK(judge_score_to_reward({0, Rubric::context_coverage},
                              RewardMapping::threshold(4)) == 0.0);
  CHECK(judge_score_to_reward({4, Rubric::context_coverage},
                              RewardMapping::threshold(4)) == 1.0);

  // Monotone nondecreasing in the raw score for both modes.
  for (const RewardMapping& mapping :
       {RewardMapping::scaled(), RewardMapping::threshold(3)}) {
    double prev = -1.0;
    for (int s = 0; s <= 5; ++s) {
      double r = judge_score_to_reward({s, Rubric::context_coverage}, mapping);
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("mock judge coverage scoring") {
  MockJudge judge;
  std::string ref = "the red ball rolled down the hill";
  CHECK(judge.evaluate(Rubric::context_coverage, ref, ref).raw_score == 5);
  CHECK(judge.evaluate(Rubric::context_coverage, ref, "quantum flux").raw_score ==
        0);
  CHECK(judge.evaluate(Rubric::context_coverage, ref, "").raw_score == 0);
  // Determinism.
  CHECK(judge.evaluate(Rubric::context_coverage, ref, "the red ball") ==
        judge.evaluate(Rubric::context_coverage, ref, "the red ball"));
  // Partial coverage lands between.
  int partial =
      judge.evaluate(Rubric::context_coverage, ref, "the red ball rolled")
          .raw_score;
  CHECK(partial >= 2);
  CHECK(partial <= 4);
}

TEST_CASE("mock judge logical rubric") {
  MockJudge judge;
  std::string context = "the clue letter is B";
  CHECK(judge.evaluate(Rubric::logical_quality, context, "").raw_score == 0);
  std::string full =
      "because the question asks for the letter clue, I review the audio and "
      "confirm the answer";
  CHECK(judge.evaluate(Rubric::logical_quality, context, full).raw_score == 5);
  std::string weak = "B";
  CHECK(judge.evaluate(Rubric::logical_quality, context, weak).raw_score <= 1);
}

TEST_CASE("mock judge counts calls") {
  MockJudge judge;
  CHECK(judge.call_count() == 0);
  judge.evaluate(Rubric::context_coverage, "a", "a");
  judge.evaluate(Rubric::logical_quality, "a", "a");
  CHECK(judge.call_count() == 2);
}

TEST_CASE("judge-backed reward wrappers") {
  MockJudge judge;
  RewardMapping thr = RewardMapping::threshold(4);
  std::string ref = "the clue letter is B";
  CHECK(context_reward(judge, ref, ref, thr) == 1.0);
  CHECK(context_reward(judge, "", ref, thr) == 0.0);
  CHECK(logical_reward(judge, ref,
                       "because the question asks audio confirm letter",
                       RewardMapping::scaled()) == 1.0);
}

TEST_CASE("prompt templates render placeholders") {
  std::string rendered =
      render_prompt(Rubric::context_coverage, "REF TEXT", "HYP TEXT");
  CHECK(rendered.find("reference: REF TEXT") != std::string::npos);
  CHECK(rendered.find("hypothesis: HYP TEXT") != std::string::npos);
  CHECK(rendered.find("{reference}") == std::string::npos);
  CHECK(rendered.find("{hypothesis}") == std::string::npos);

  std::string logical = render_prompt(Rubric::logical_quality, "C", "R");
  CHECK(logical.find("context: C") != std::string::npos);
  CHECK(logical.find("reasoning path: R") != std::string::npos);
  CHECK(logical.find("Integration of Clues (1 point)") != std::string::npos);
}

TEST_CASE("embedded templates match the versioned assets") {
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string dir = SEGRPO_ASSET_DIR "/prompts/";
  CHECK(slurp(dir + "context_coverage_v1.txt") ==
        prompt_template(Rubric::context_coverage));
  CHECK(slurp(dir + "logical_rubric_v1.txt") ==
        prompt_template(Rubric::logical_quality));
  CHECK(slurp(dir + "system_prompt_v1.txt") == system_prompt());
  CHECK(prompt_template(Rubric::open_similarity) ==
        prompt_template(Rubric::context_coverage));
}

namespace {

struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit StubServer(httplib::Server::Handler handler) {
    server.Post("/score", std::move(handler));
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    thread.join();
  }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port);
  }
};

RemoteJudgeConfig fast_config(const std::string& endpoint) {
  RemoteJudgeConfig cfg;
  cfg.endpoint = endpoint;
  cfg.timeout_ms = 2000;
  cfg.retries = 2;
  cfg.backoff_base_ms = 1;
  return cfg;
}

}  // namespace

TEST_CASE("remote judge round-trips the wire protocol") {
  std::atomic<int> hits{0};
  nlohmann::json seen;
  std::mutex seen_mu;
  StubServer stub([&](const httplib::Request& req, httplib::Response& res) {
    hits.fetch_add(1);
    {
      std::lock_guard<std::mutex> lock(seen_mu);
      seen = nlohmann::json::parse(req.body);
    }
    res.set_content("{\"score\": 4}", "application/json");
  });

  RemoteJudge judge(fast_config(stub.endpoint()));
  JudgeScore score = judge.evaluate(Rubric::context_coverage, "refc", "hypc");
  CHECK(score == JudgeScore{4, Rubric::context_coverage});
  CHECK(hits.load() == 1);
  CHECK(seen["rubric"] == "context_coverage");
  CHECK(seen["reference"] == "refc");
  CHECK(seen["hypothesis"] == "hypc");
}

TEST_CASE("remote judge retries transient failures") {
  std::atomic<int> hits{0};
  StubServer stub([&](const httplib::Request&, httplib::Response& res) {
    if (hits.fetch_add(1) < 2) {
      res.status = 500;
      return;
    }
    res.set_content("{\"score\": 2}", "application/json");
  });

  RemoteJudge judge(fast_config(stub.endpoint()));
  JudgeScore score = judge.evaluate(Rubric::logical_quality, "r", "h");
  CHECK(score.raw_score == 2);
  CHECK(hits.load() == 3);
}

TEST_CASE("remote judge surfaces malformed replies") {
  StubServer garbled([](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "text/plain");
  });
  RemoteJudge judge(fast_config(garbled.endpoint()));
  CHECK_THROWS_AS(judge.evaluate(Rubric::context_coverage, "r", "h"),
                  MalformedJudgeReply);

  StubServer out_of_range([](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"score\": 9}", "application/json");
  });
  RemoteJudge judge2(fast_config(out_of_range.endpoint()));
  CHECK_THROWS_AS(judge2.evaluate(Rubric::context_coverage, "r", "h"),
                  MalformedJudgeReply);

  StubServer fractional([](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"score\": 3.5}", "application/json");
  });
  RemoteJudge judge3(fast_config(fractional.endpoint()));
  CHECK_THROWS_AS(judge3.evaluate(Rubric::context_coverage, "r", "h"),
                  MalformedJudgeReply);
}

TEST_CASE("remote judge reports unreachable backends") {
  RemoteJudgeConfig cfg = fast_config("http://127.0.0.1:1");
  cfg.retries = 1;
  cfg.timeout_ms = 200;
  RemoteJudge judge(cfg);
  CHECK_THROWS_AS(judge.evaluate(Rubric::context_coverage, "r", "h"),
                  JudgeUnavailable);
}
