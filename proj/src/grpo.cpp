// Copyright 2026 the segrpo authors
// SPDX-License-Identifier: Apache-2.0

#include "segrpo/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "segrpo/errors.hpp"

namespace segrpo {

std::size_t RolloutGroup::total_tokens() const {
  std::size_t n = 0;
  for (const auto& c : completions) {
    n += c.size();
  }
  return n;
}

void RolloutGroup::validate() const {
  if (size() < 2) {
    throw GroupTooSmall("rollout group for '" + question_id + "' has " +
                        std::to_string(size()) +
                        " completions; need at least 2");
  }
  if (logp_old.size() != size() || logp_ref.size() != size() ||
      masks.size() != size() || rewards.size() != size()) {
    throw ShapeMismatch("per-completion arrays disagree on group size");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    std::size_t len = completions[i].size();
    if (logp_old[i].size() != len || logp_ref[i].size() != len ||
        masks[i].num_tokens() != len) {
      throw ShapeMismatch("completion " + std::to_string(i) +
                          " arrays disagree on token count");
    }
  }
}

std::vector<double> group_advantages(std::span<const double> values) {
  if (values.size() < 2) {
    throw GroupTooSmall("group statistics need at least 2 values");
  }
  double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = values[i] - mean;
  }
  return out;
}

AdvantageField masked_advantage_field(const RolloutGroup& group,
                                      const StreamSet& enabled) {
  group.validate();
  const std::size_t G = group.size();

  auto stream_values = [&](auto member, const char* name) {
    std::vector<double> vals(G);
    for (std::size_t i = 0; i < G; ++i) {
      const auto& v = group.rewards[i].*member;
      if (!v) {
        throw MissingStream("enabled stream '" + std::string(name) +
                            "' absent in completion " + std::to_string(i));
      }
      vals[i] = *v;
    }
    return vals;
  };

  // Base stream: r_f + r_a summed before mean subtraction (mean subtraction
  // is linear, so this equals the sum of the two normalized streams).
  std::vector<double> base(G, 0.0);
  bool has_base = false;
  if (enabled.format) {
    auto v = stream_values(&RewardVector::format, "format");
    for (std::size_t i = 0; i < G; ++i) base[i] += v[i];
    has_base = true;
  }
  if (enabled.accuracy) {
    auto v = stream_values(&RewardVector::accuracy, "accuracy");
    for (std::size_t i = 0; i < G; ++i) base[i] += v[i];
    has_base = true;
  }
  std::vector<double> base_adv(G, 0.0);
  if (has_base) {
    base_adv = group_advantages(base);
  }

  std::vector<double> ctx_adv(G, 0.0);
  if (enabled.context) {
    ctx_adv = group_advantages(stream_values(&RewardVector::context,
                                             "context"));
  }
  std::vector<double> log_adv(G, 0.0);
  if (enabled.logical) {
    log_adv = group_advantages(stream_values(&RewardVector::logical,
                                             "logical"));
  }

  AdvantageField field;
  field.adv.resize(G);
  for (std::size_t i = 0; i < G; ++i) {
    const std::size_t len = group.completions[i].size();
    field.adv[i].assign(len, 0.0);
    const SegmentMask& mask = group.masks[i];
    for (std::size_t t = 0; t < len; ++t) {
      double a = base_adv[i];
      if (enabled.context && mask.in_context(t)) {
        a += ctx_adv[i];
      }
      if (enabled.logical && (mask.in_context(t) || mask.in_think(t))) {
        a += log_adv[i];
      }
      field.adv[i][t] = a;
    }
  }
  return field;
}

double ppo_clip_term(double ratio, double adv, double epsilon) {
  double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * adv, clipped * adv);
}

double k3_kl(double logp_theta, double logp_ref) {
  // rho - log(rho) - 1 == expm1(d) - d with d = logp_ref - logp_theta.
  double d = logp_ref - logp_theta;
  return std::expm1(d) - d;
}

double beta_schedule(std::int64_t k, std::int64_t S, double beta1,
                     double beta2) {
  if (k < 0 || S < 1) {
    throw ConfigError("beta_schedule requires k >= 0 and S >= 1");
  }
  if (k > S) {
    return beta2;
  }
  double t = static_cast<double>(k) / static_cast<double>(S);
  // Convex-combination form keeps the endpoints and midpoint exact.
  return beta1 * (1.0 - t) + beta2 * t;
}

GrpoLoss grpo_loss(std::span<const RolloutGroup> groups,
                   std::span<const AdvantageField> advantages,
                   const LogpBatch& logp_theta, double epsilon,
                   double beta_hat) {
  if (advantages.size() != groups.size() ||
      logp_theta.size() != groups.size()) {
    throw ShapeMismatch("batch arrays disagree on group count");
  }

  GrpoLoss out;
  out.d_logp.resize(groups.size());

  std::size_t total_tokens = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    groups[g].validate();
    if (advantages[g].adv.size() != groups[g].size() ||
        logp_theta[g].size() != groups[g].size()) {
      throw ShapeMismatch("group " + std::to_string(g) +
                          " arrays disagree on completion count");
    }
    for (std::size_t i = 0; i < groups[g].size(); ++i) {
      std::size_t len = groups[g].completions[i].size();
      if (advantages[g].adv[i].size() != len ||
          logp_theta[g][i].size() != len) {
        throw ShapeMismatch("group " + std::to_string(g) + " completion " +
                            std::to_string(i) +
                            " arrays disagree on token count");
      }
      total_tokens += len;
    }
  }
  if (total_tokens == 0) {
    throw ShapeMismatch("batch contains no tokens");
  }
  out.total_tokens = total_tokens;
  const double inv_tokens = 1.0 / static_cast<double>(total_tokens);

  double surrogate_sum = 0.0;
  double kl_sum = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const RolloutGroup& group = groups[g];
    out.d_logp[g].resize(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) {
      const std::size_t len = group.completions[i].size();
      out.d_logp[g][i].assign(len, 0.0);
      for (std::size_t t = 0; t < len; ++t) {
        const double lt = logp_theta[g][i][t];
        const double lo = group.logp_old[i][t];
        const double lr = group.logp_ref[i][t];
        const double adv = advantages[g].adv[i][t];

        const double ratio = std::exp(lt - lo);
        surrogate_sum += ppo_clip_term(ratio, adv, epsilon);

        // d/d(logp) of the min-term: the unclipped branch is active when the
        // ratio is on the non-adverse side of the clip band, where the
        // derivative is ratio*adv (d ratio/d logp = ratio); otherwise the
        // clipped constant branch wins and the derivative is 0.
        double surr_grad = 0.0;
        if (adv != 0.0) {
          bool unclipped_active =
              adv > 0.0 ? ratio <= 1.0 + epsilon : ratio >= 1.0 - epsilon;
          if (unclipped_active) {
            surr_grad = ratio * adv;
          }
        }

        const double d = lr - lt;
        kl_sum += std::expm1(d) - d;
        const double kl_grad = -std::expm1(d);  // d k3 / d logp_theta

        out.d_logp[g][i][t] = inv_tokens * (surr_grad - beta_hat * kl_grad);
      }
    }
  }

  out.surrogate = surrogate_sum * inv_tokens;
  out.kl = kl_sum * inv_tokens;
  out.objective = out.surrogate - beta_hat * out.kl;
  return out;
}

}  // namespace segrpo
