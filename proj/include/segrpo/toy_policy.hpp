// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "segrpo/format.hpp"

namespace segrpo {

// A miniature autoregressive policy with exact log-probabilities and exact
// gradients, used to verify optimizer semantics end to end. Logits live in a
// table indexed by (prompt id, previous n tokens); unvisited keys behave as
// all-zero logits (uniform). The same temperature drives sampling and
// log_probs so importance ratios stay exact.
class ToyPolicy {
 public:
  // Conditioning key. prev is padded with kBos on the left at the start of a
  // sequence; slots beyond the window hold kUnused.
  struct Key {
    int prompt_id = 0;
    std::array<int, 2> prev = {kUnused, kUnused};

    auto operator<=>(const Key&) const = default;
  };
  static constexpr int kBos = -1;
  static constexpr int kUnused = -2;

  using ParamTable = std::map<Key, std::vector<double>>;

  ToyPolicy(std::vector<std::string> vocab, int context_window = 1,
            double temperature = 1.0, std::string end_token = "<eos>");

  int vocab_size() const { return static_cast<int>(vocab_.size()); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  int context_window() const { return n_; }
  double temperature() const { return temperature_; }
  int end_token_id() const { return end_token_id_; }
  int token_id(std::string_view token) const;  // throws UnknownToken

  // Autoregressive categorical sampling until the end token or max_tokens.
  // The end token, when drawn, is included in the returned sequence.
  // Deterministic for a given seed.
  std::vector<int> sample_completion(int prompt_id, int max_tokens,
                                     std::uint64_t seed) const;

  // Exact log-softmax value for each position of `tokens`.
  std::vector<double> log_probs(int prompt_id, std::span<const int> tokens) const;

  // Gradient of sum_t log p(tokens[t] | key_t) with respect to the logits:
  // (one_hot(token) - softmax) / temperature accumulated per visited key.
  ParamTable grad_log_prob(int prompt_id, std::span<const int> tokens) const;

  // Same as grad_log_prob but with a per-position weight; used to chain
  // d(objective)/d(logp) into d(objective)/d(params).
  void accumulate_weighted_logp_grad(int prompt_id, std::span<const int> tokens,
                                     std::span<const double> weights,
                                     ParamTable& out) const;

  // params += scale * grad.
  void apply_gradient(const ParamTable& grad, double scale);

  void add_logit_bias(int prompt_id, std::span<const int> prev, int token,
                      double bias);

  // Softmax distribution at a key (zeros for unvisited keys).
  std::vector<double> distribution(const Key& key) const;

  std::string detokenize(std::span<const int> tokens) const;
  // Character tiling of detokenize(tokens); the end token is zero-width.
  std::vector<CharSpan> token_char_offsets(std::span<const int> tokens) const;

  // Checkpoint document {version, n, temperature, end_token, vocab, params}
  // with byte-stable ordering.
  nlohmann::json to_json() const;
  static ToyPolicy from_json(const nlohmann::json& j);

  const ParamTable& params() const { return params_; }

  Key key_at(int prompt_id, std::span<const int> tokens, std::size_t t) const;

 private:
  const std::vector<double>* logits_at(const Key& key) const;
  std::vector<double> log_softmax_at(const Key& key) const;
  void check_tokens(std::span<const int> tokens) const;

  std::vector<std::string> vocab_;
  std::map<std::string, int, std::less<>> token_ids_;
  int n_ = 1;
  double temperature_ = 1.0;
  int end_token_id_ = 0;
  ParamTable params_;
};

// L2 norm over every entry of a gradient table.
double param_table_norm(const ToyPolicy::ParamTable& table);

}  // namespace segrpo
