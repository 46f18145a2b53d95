// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/rewards.hpp"

#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "segrpo/errors.hpp"

using namespace segrpo;

namespace {

// Exhaustive recursive edit distance, the independent oracle for the DP.
std::size_t edit_distance_recursive(std::span<const std::string> a,
                                    std::span<const std::string> b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  std::size_t tail_a = a.size() - 1;
  std::size_t tail_b = b.size() - 1;
  std::size_t sub = edit_distance_recursive(a.subspan(0, tail_a),
                                            b.subspan(0, tail_b)) +
                    (a[tail_a] == b[tail_b] ? 0 : 1);
  std::size_t del = edit_distance_recursive(a.subspan(0, tail_a), b) + 1;
  std::size_t ins = edit_distance_recursive(a, b.subspan(0, tail_b)) + 1;
  return std::min({sub, del, ins});
}

std::vector<std::string> random_words(std::mt19937_64& rng,
                                      std::size_t max_len) {
  static const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  std::size_t len = rng() % (max_len + 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(vocab[rng() % vocab.size()]);
  }
  return out;
}

}  // namespace

TEST_CASE("single-choice accuracy extracts the first standalone letter") {
  GoldSpec gold = GoldSpec::mc_single('B');
  CHECK(mc_single_reward("The answer is B.", gold) == 1.0);
  CHECK(mc_single_reward("B", gold) == 1.0);
  CHECK(mc_single_reward("(C) because...", gold) == 0.0);
  CHECK(mc_single_reward("", gold) == 0.0);
  CHECK(mc_single_reward("no option here", gold) == 0.0);
  CHECK(mc_single_reward("b)", gold) == 1.0);  // case-insensitive
}

TEST_CASE("option letter extraction") {
  CHECK(first_option_letter("The answer is B.") == 'B');
  CHECK(first_option_letter("words only") == std::nullopt);
  CHECK(all_option_letters("A, c and D") == std::set<char>{'A', 'C', 'D'});
  CHECK(all_option_letters("abc") == std::set<char>{});
}

TEST_CASE("multi-answer F1") {
  CHECK(multi_answer_f1({'A', 'C'}, {'A', 'C'}) == 1.0);
  CHECK(multi_answer_f1({'A', 'B'}, {'A', 'C'}) == 0.5);
  CHECK(multi_answer_f1({}, {'A'}) == 0.0);
  CHECK_THROWS_AS(multi_answer_f1({'A'}, {}), DataError);
}

TEST_CASE("F1 equals the set-arithmetic oracle on all 5-option subsets") {
  const std::set<char> universe = {'A', 'B', 'C', 'D', 'E'};
  std::vector<std::set<char>> subsets;
  for (int bits = 0; bits < 32; ++bits) {
    std::set<char> s;
    int i = 0;
    for (char c : universe) {
      if (bits & (1 << i)) s.insert(c);
      ++i;
    }
    subsets.push_back(std::move(s));
  }
  for (const auto& pred : subsets) {
    for (const auto& gold : subsets) {
      if (gold.empty()) continue;
      std::set<char> inter;
      for (char c : pred) {
        if (gold.count(c)) inter.insert(c);
      }
      double p = pred.empty() ? 0.0 : double(inter.size()) / double(pred.size());
      double r = double(inter.size()) / double(gold.size());
      double expected = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
      CHECK(multi_answer_f1(pred, gold) == expected);
      // F1 hits 1 exactly when the sets are equal.
      CHECK((multi_answer_f1(pred, gold) == 1.0) == (pred == gold));
    }
  }
}

TEST_CASE("WER via dynamic programming") {
  std::vector<std::string> ref = {"the", "cat", "sat"};
  CHECK(wer(ref, ref) == 0.0);

  std::vector<std::string> ref2 = {"a", "b", "c", "d"};
  std::vector<std::string> hyp2 = {"a", "x", "c"};
  CHECK(wer(ref2, hyp2) == 0.5);  // one substitution + one deletion

  std::vector<std::string> ref3 = {"a"};
  std::vector<std::string> hyp3 = {"x", "y", "z"};
  CHECK(wer(ref3, hyp3) == 3.0);  // WER may exceed 1

  CHECK_THROWS_AS(wer({}, hyp3), EmptyReference);
}

TEST_CASE("WER equals the recursive oracle on random word lists") {
  std::mt19937_64 rng(101);
  int checked = 0;
  while (checked < 1000) {
    std::vector<std::string> ref = random_words(rng, 8);
    if (ref.empty()) continue;
    std::vector<std::string> hyp = random_words(rng, 8);
    std::size_t dist = edit_distance_recursive(ref, hyp);
    CHECK(wer(ref, hyp) ==
          static_cast<double>(dist) / static_cast<double>(ref.size()));
    ++checked;
  }
}

TEST_CASE("transcript reward is clamped 1-WER over lowercased words") {
  GoldSpec gold = GoldSpec::transcript("a b c d");
  CHECK(transcript_reward("A B C D", gold) == 1.0);
  CHECK(transcript_reward("a x c", gold) == 0.5);
  GoldSpec one = GoldSpec::transcript("a");
  CHECK(transcript_reward("x y z", one) == 0.0);  // 1 - 3.0 clamps to 0
}

TEST_CASE("numeric reward parses the last literal") {
  CHECK(numeric_reward("3.50", GoldSpec::numeric(3.5, 1e-6)) == 1.0);
  CHECK(numeric_reward("answer: -2", GoldSpec::numeric(2.0)) == 0.0);
  CHECK(numeric_reward("x = 1.0e3", GoldSpec::numeric(1000.0, 1e-9)) == 1.0);
  CHECK(numeric_reward("first 3 then 7", GoldSpec::numeric(7.0)) == 1.0);
  CHECK(numeric_reward("no numbers", GoldSpec::numeric(1.0)) == 0.0);
  CHECK(numeric_reward(".5 at the start", GoldSpec::numeric(0.5)) == 1.0);
}

TEST_CASE("accuracy dispatch covers the whole family") {
  MockJudge judge;
  CHECK(accuracy_reward("The answer is B.", GoldSpec::mc_single('B'), judge) ==
        1.0);
  CHECK(accuracy_reward("A and B", GoldSpec::mc_multi({'A', 'C'}), judge) ==
        0.5);
  CHECK(accuracy_reward("= 42", GoldSpec::numeric(42.0), judge) == 1.0);
  CHECK(accuracy_reward("the cat sat", GoldSpec::transcript("the cat sat"),
                        judge) == 1.0);
  // Identical open-ended answer: coverage 5 -> scaled 5/5.
  CHECK(accuracy_reward("water boils at one hundred degrees",
                        GoldSpec::open_ended("water boils at one hundred degrees"),
                        judge) == 1.0);
}

TEST_CASE("rewards stay in [0,1] on garbage inputs") {
  MockJudge judge;
  std::mt19937_64 rng(202);
  static const std::string alphabet = "abcXYZ 0123.<>/-+e";
  for (int i = 0; i < 300; ++i) {
    std::string junk;
    for (std::size_t j = 0; j < rng() % 30; ++j) {
      junk.push_back(alphabet[rng() % alphabet.size()]);
    }
    for (const GoldSpec& gold :
         {GoldSpec::mc_single('B'), GoldSpec::mc_multi({'A', 'D'}),
          GoldSpec::numeric(3.0, 0.5), GoldSpec::transcript("a b c"),
          GoldSpec::open_ended("reference text")}) {
      double r = accuracy_reward(junk, gold, judge);
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
  }
}

TEST_CASE("gold spec JSON round-trip and validation") {
  for (const GoldSpec& gold :
       {GoldSpec::mc_single('B'), GoldSpec::mc_multi({'A', 'C'}),
        GoldSpec::numeric(3.5, 1e-6), GoldSpec::transcript("the cat"),
        GoldSpec::open_ended("free text")}) {
    CHECK(GoldSpec::from_json(gold.to_json()) == gold);
  }
  // Fields must match the declared answer type.
  nlohmann::json bad = {{"answer_type", "numeric"}, {"gold_choice", "B"}};
  CHECK_THROWS_AS(GoldSpec::from_json(bad), SchemaError);
  nlohmann::json empty_set = {{"answer_type", "mc_multi"},
                              {"gold_set", nlohmann::json::array()}};
  CHECK_THROWS_AS(GoldSpec::from_json(empty_set), SchemaError);
}
