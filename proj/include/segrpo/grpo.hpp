// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0
//
// The optimizer core: group-relative advantages with per-stream
// normalization and segment masking, clipped token-level surrogate, k3 KL
// penalty and its linear coefficient schedule.
//
// Conventions:
// - Advantages are mean-only: R_i - mean over the group. No std division and
//   no question-level normalization.
// - The format+accuracy stream is summed before normalization and applies to
//   every token. The context stream applies to context tokens; the logical
//   stream to context and think tokens.
// - Loss and KL penalty are both normalized by the total token count across
//   the batch, never per completion.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "segrpo/format.hpp"
#include "segrpo/rewards.hpp"

namespace segrpo {

// The G completions sampled for one question, with the per-token
// log-probabilities under the sampling policy (logp_old) and the frozen
// reference policy (logp_ref).
struct RolloutGroup {
  std::string question_id;
  int prompt_id = 0;
  std::vector<std::vector<int>> completions;
  std::vector<std::vector<double>> logp_old;
  std::vector<std::vector<double>> logp_ref;
  std::vector<SegmentMask> masks;
  std::vector<RewardVector> rewards;

  std::size_t size() const { return completions.size(); }
  std::size_t total_tokens() const;
  // Checks aligned array lengths and G >= 2.
  void validate() const;
};

struct AdvantageField {
  std::vector<std::vector<double>> adv;  // [completion][token]
};

// values minus their arithmetic mean. Throws GroupTooSmall for G < 2.
std::vector<double> group_advantages(std::span<const double> values);

// Builds the per-token advantage field from the enabled reward streams.
// base = group_advantages(r_f + r_a) on all tokens; ctx = group_advantages
// (r_c) on context tokens; log = group_advantages(r_l) on context+think
// tokens. Throws MissingStream when an enabled stream is absent from any
// completion's RewardVector.
AdvantageField masked_advantage_field(const RolloutGroup& group,
                                      const StreamSet& enabled);

// min(ratio * adv, clip(ratio, 1-eps, 1+eps) * adv).
double ppo_clip_term(double ratio, double adv, double epsilon);

// k3 estimator of KL(pi_theta || pi_ref) at one token:
// rho - log(rho) - 1 with rho = exp(logp_ref - logp_theta). Non-negative.
double k3_kl(double logp_theta, double logp_ref);

// Linear decay of the KL coefficient from beta1 to beta2 over the first S
// steps, constant beta2 afterwards.
double beta_schedule(std::int64_t k, std::int64_t S, double beta1,
                     double beta2);

// Per-token log-probabilities for a batch: [group][completion][token].
using LogpBatch = std::vector<std::vector<std::vector<double>>>;

struct GrpoLoss {
  double objective = 0.0;   // surrogate - beta_hat * kl
  double surrogate = 0.0;   // token-mean clipped surrogate
  double kl = 0.0;          // token-mean k3 value
  std::size_t total_tokens = 0;
  LogpBatch d_logp;         // d(objective)/d(logp_theta), same shape
};

// Token-level GRPO objective over a batch of groups, with its exact gradient
// with respect to logp_theta. Clipped-and-adverse tokens contribute zero
// gradient. Throws ShapeMismatch when logp_theta or the advantage fields do
// not line up with the groups.
GrpoLoss grpo_loss(std::span<const RolloutGroup> groups,
                   std::span<const AdvantageField> advantages,
                   const LogpBatch& logp_theta, double epsilon,
                   double beta_hat);

}  // namespace segrpo
