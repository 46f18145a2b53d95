// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/toy_policy.hpp"

#include <algorithm>
#include <cmath>

#include "segrpo/errors.hpp"
#include "segrpo/rng.hpp"

namespace segrpo {

ToyPolicy::ToyPolicy(std::vector<std::string> vocab, int context_window,
                     double temperature, std::string end_token)
    : vocab_(std::move(vocab)), n_(context_window), temperature_(temperature) {
  if (n_ != 1 && n_ != 2) {
    throw ConfigError("context window must be 1 or 2");
  }
  if (temperature_ <= 0.0) {
    throw ConfigError("temperature must be positive");
  }
  if (vocab_.empty()) {
    throw ConfigError("vocabulary must be non-empty");
  }
  for (int i = 0; i < static_cast<int>(vocab_.size()); ++i) {
    if (!token_ids_.emplace(vocab_[i], i).second) {
      throw ConfigError("duplicate vocabulary token '" + vocab_[i] + "'");
    }
  }
  auto it = token_ids_.find(end_token);
  if (it == token_ids_.end()) {
    throw ConfigError("end token '" + end_token + "' missing from vocabulary");
  }
  end_token_id_ = it->second;
}

int ToyPolicy::token_id(std::string_view token) const {
  auto it = token_ids_.find(token);
  if (it == token_ids_.end()) {
    throw UnknownToken("token '" + std::string(token) + "' not in vocabulary");
  }
  return it->second;
}

void ToyPolicy::check_tokens(std::span<const int> tokens) const {
  for (int tok : tokens) {
    if (tok < 0 || tok >= vocab_size()) {
      throw UnknownToken("token id " + std::to_string(tok) +
                         " outside vocabulary");
    }
  }
}

ToyPolicy::Key ToyPolicy::key_at(int prompt_id, std::span<const int> tokens,
                                 std::size_t t) const {
  Key key;
  key.prompt_id = prompt_id;
  for (int j = 0; j < n_; ++j) {
    // prev[0] is the most recent token.
    std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(t) - 1 - j;
    key.prev[static_cast<std::size_t>(j)] =
        idx >= 0 ? tokens[static_cast<std::size_t>(idx)] : kBos;
  }
  return key;
}

const std::vector<double>* ToyPolicy::logits_at(const Key& key) const {
  auto it = params_.find(key);
  return it == params_.end() ? nullptr : &it->second;
}

std::vector<double> ToyPolicy::log_softmax_at(const Key& key) const {
  const std::vector<double>* logits = logits_at(key);
  const std::size_t V = vocab_.size();
  std::vector<double> scaled(V, 0.0);
  if (logits) {
    for (std::size_t v = 0; v < V; ++v) {
      scaled[v] = (*logits)[v] / temperature_;
    }
  }
  double max = *std::max_element(scaled.begin(), scaled.end());
  double sum = 0.0;
  for (double s : scaled) {
    sum += std::exp(s - max);
  }
  double lse = max + std::log(sum);
  for (double& s : scaled) {
    s -= lse;
  }
  return scaled;
}

std::vector<double> ToyPolicy::distribution(const Key& key) const {
  std::vector<double> probs = log_softmax_at(key);
  for (double& p : probs) {
    p = std::exp(p);
  }
  return probs;
}

std::vector<int> ToyPolicy::sample_completion(int prompt_id, int max_tokens,
                                              std::uint64_t seed) const {
  if (max_tokens < 1) {
    throw ConfigError("max_tokens must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::vector<int> tokens;
  tokens.reserve(static_cast<std::size_t>(max_tokens));
  while (static_cast<int>(tokens.size()) < max_tokens) {
    Key key = key_at(prompt_id, tokens, tokens.size());
    std::vector<double> probs = distribution(key);
    double u = canonical_unit(rng);
    double acc = 0.0;
    int chosen = vocab_size() - 1;
    for (int v = 0; v < vocab_size(); ++v) {
      acc += probs[static_cast<std::size_t>(v)];
      if (u < acc) {
        chosen = v;
        break;
      }
    }
    tokens.push_back(chosen);
    if (chosen == end_token_id_) {
      break;
    }
  }
  return tokens;
}

std::vector<double> ToyPolicy::log_probs(int prompt_id,
                                         std::span<const int> tokens) const {
  check_tokens(tokens);
  std::vector<double> out(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    Key key = key_at(prompt_id, tokens, t);
    out[t] = log_softmax_at(key)[static_cast<std::size_t>(tokens[t])];
  }
  return out;
}

void ToyPolicy::accumulate_weighted_logp_grad(int prompt_id,
                                              std::span<const int> tokens,
                                              std::span<const double> weights,
                                              ParamTable& out) const {
  check_tokens(tokens);
  if (weights.size() != tokens.size()) {
    throw ShapeMismatch("weights and tokens disagree on length");
  }
  const std::size_t V = vocab_.size();
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const double w = weights[t];
    if (w == 0.0) {
      continue;
    }
    Key key = key_at(prompt_id, tokens, t);
    std::vector<double> probs = distribution(key);
    auto [it, inserted] = out.try_emplace(key, std::vector<double>(V, 0.0));
    std::vector<double>& row = it->second;
    const double scale = w / temperature_;
    for (std::size_t v = 0; v < V; ++v) {
      row[v] -= scale * probs[v];
    }
    row[static_cast<std::size_t>(tokens[t])] += scale;
  }
}

ToyPolicy::ParamTable ToyPolicy::grad_log_prob(
    int prompt_id, std::span<const int> tokens) const {
  ParamTable out;
  std::vector<double> ones(tokens.size(), 1.0);
  accumulate_weighted_logp_grad(prompt_id, tokens, ones, out);
  return out;
}

void ToyPolicy::apply_gradient(const ParamTable& grad, double scale) {
  const std::size_t V = vocab_.size();
  for (const auto& [key, row] : grad) {
    if (row.size() != V) {
      throw ShapeMismatch("gradient row size disagrees with vocabulary");
    }
    auto [it, inserted] = params_.try_emplace(key, std::vector<double>(V, 0.0));
    std::vector<double>& target = it->second;
    for (std::size_t v = 0; v < V; ++v) {
      target[v] += scale * row[v];
    }
  }
}

void ToyPolicy::add_logit_bias(int prompt_id, std::span<const int> prev,
                               int token, double bias) {
  if (static_cast<int>(prev.size()) != n_) {
    throw ShapeMismatch("prev context length disagrees with window");
  }
  Key key;
  key.prompt_id = prompt_id;
  for (int j = 0; j < n_; ++j) {
    key.prev[static_cast<std::size_t>(j)] = prev[static_cast<std::size_t>(j)];
  }
  auto [it, inserted] =
      params_.try_emplace(key, std::vector<double>(vocab_.size(), 0.0));
  it->second[static_cast<std::size_t>(token)] += bias;
}

std::string ToyPolicy::detokenize(std::span<const int> tokens) const {
  check_tokens(tokens);
  std::string out;
  for (int tok : tokens) {
    if (tok == end_token_id_) {
      continue;  // zero-width
    }
    out += vocab_[static_cast<std::size_t>(tok)];
  }
  return out;
}

std::vector<CharSpan> ToyPolicy::token_char_offsets(
    std::span<const int> tokens) const {
  check_tokens(tokens);
  std::vector<CharSpan> out;
  out.reserve(tokens.size());
  std::size_t cursor = 0;
  for (int tok : tokens) {
    std::size_t len =
        tok == end_token_id_ ? 0 : vocab_[static_cast<std::size_t>(tok)].size();
    out.push_back(CharSpan{cursor, cursor + len});
    cursor += len;
  }
  return out;
}

nlohmann::json ToyPolicy::to_json() const {
  nlohmann::json j;
  j["version"] = "segrpo.policy.v1";
  j["n"] = n_;
  j["temperature"] = temperature_;
  j["end_token"] = vocab_[static_cast<std::size_t>(end_token_id_)];
  j["vocab"] = vocab_;
  auto params = nlohmann::json::array();
  for (const auto& [key, row] : params_) {
    nlohmann::json entry;
    entry["p"] = key.prompt_id;
    auto prev = nlohmann::json::array();
    for (int j2 = 0; j2 < n_; ++j2) {
      prev.push_back(key.prev[static_cast<std::size_t>(j2)]);
    }
    entry["prev"] = std::move(prev);
    entry["logits"] = row;
    params.push_back(std::move(entry));
  }
  j["params"] = std::move(params);
  return j;
}

ToyPolicy ToyPolicy::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("version", "") != "segrpo.policy.v1") {
    throw DataError("unsupported policy checkpoint version");
  }
  ToyPolicy policy(j.at("vocab").get<std::vector<std::string>>(),
                   j.at("n").get<int>(), j.at("temperature").get<double>(),
                   j.at("end_token").get<std::string>());
  for (const auto& entry : j.at("params")) {
    Key key;
    key.prompt_id = entry.at("p").get<int>();
    auto prev = entry.at("prev").get<std::vector<int>>();
    if (static_cast<int>(prev.size()) != policy.n_) {
      throw DataError("checkpoint key context length disagrees with n");
    }
    for (std::size_t i = 0; i < prev.size(); ++i) {
      key.prev[i] = prev[i];
    }
    auto logits = entry.at("logits").get<std::vector<double>>();
    if (logits.size() != policy.vocab_.size()) {
      throw DataError("checkpoint logits row disagrees with vocabulary size");
    }
    policy.params_[key] = std::move(logits);
  }
  return policy;
}

double param_table_norm(const ToyPolicy::ParamTable& table) {
  double sq = 0.0;
  for (const auto& [key, row] : table) {
    for (double v : row) {
      sq += v * v;
    }
  }
  return std::sqrt(sq);
}

}  // namespace segrpo
