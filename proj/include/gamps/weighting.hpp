// Copyright 2026 The GAMPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAMPS_WEIGHTING_HPP
#define GAMPS_WEIGHTING_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gamps/error.hpp"
#include "gamps/mdp.hpp"
#include "gamps/policies.hpp"

/**
 * \file
 * \brief Importance weights, gradient-aware transition weights, effective
 * sample size and the η weighting distribution.
 */

namespace gamps {

/// Log importance ratios are clamped to this magnitude before exponentiation.
inline constexpr double kMaxLogWeight = 700.0;

struct PrefixWeights {
  std::vector<double> rho;     ///< ρ(τ_{0:t}) for t = 0..T-1
  bool support_violation{false};  ///< π(a_t|s_t) = 0 at some step; later weights are 0
};

/// ρ(τ_{0:t}) = Π_{k≤t} π(a_k|s_k)/π_b(a_k|s_k), accumulated in log space.
inline PrefixWeights prefix_weights_from_logps(std::span<const double> target_logps,
                                               std::span<const double> behavior_logps) {
  if (target_logps.size() != behavior_logps.size()) {
    throw ValidationError("prefix weights: log-probability sequences differ in length");
  }
  PrefixWeights out;
  out.rho.reserve(target_logps.size());
  double log_rho = 0.0;
  for (std::size_t t = 0; t < target_logps.size(); ++t) {
    if (std::isinf(behavior_logps[t]) && behavior_logps[t] < 0.0) {
      throw InvalidDatasetError("behavior policy has zero probability on the action observed at step " +
                                std::to_string(t));
    }
    if (out.support_violation || (std::isinf(target_logps[t]) && target_logps[t] < 0.0)) {
      out.support_violation = true;
      out.rho.push_back(0.0);
      continue;
    }
    log_rho += target_logps[t] - behavior_logps[t];
    out.rho.push_back(std::exp(std::clamp(log_rho, -kMaxLogWeight, kMaxLogWeight)));
  }
  return out;
}

/// Prefix weights using the behavior log-probabilities cached in the trajectory.
template <class Policy, class S, class A>
PrefixWeights prefix_importance_weights(const Trajectory<S, A>& traj, const Policy& pi) {
  std::vector<double> target;
  std::vector<double> behavior;
  target.reserve(traj.size());
  behavior.reserve(traj.size());
  for (const auto& step : traj.steps) {
    target.push_back(pi.log_prob(step.state, step.action));
    behavior.push_back(step.behavior_logp);
  }
  return prefix_weights_from_logps(target, behavior);
}

/// Prefix weights with the behavior probabilities re-evaluated from `pi_b`.
template <class Policy, class BehaviorPolicy, class S, class A>
PrefixWeights prefix_importance_weights(const Trajectory<S, A>& traj, const Policy& pi,
                                        const BehaviorPolicy& pi_b) {
  std::vector<double> target;
  std::vector<double> behavior;
  target.reserve(traj.size());
  behavior.reserve(traj.size());
  for (const auto& step : traj.steps) {
    target.push_back(pi.log_prob(step.state, step.action));
    behavior.push_back(pi_b.log_prob(step.state, step.action));
  }
  return prefix_weights_from_logps(target, behavior);
}

namespace detail {

template <class Policy, class S, class A>
std::vector<double> transition_weights_from_rho(const Trajectory<S, A>& traj, const Policy& pi,
                                                const std::vector<double>& rho, double gamma, QNorm q) {
  std::vector<double> omega;
  omega.reserve(traj.size());
  double score_sum = 0.0;
  double discount = 1.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto& step = traj.steps[t];
    score_sum += score_qnorm(pi, step.state, step.action, q);
    omega.push_back(discount * rho[t] * score_sum);
    discount *= gamma;
  }
  return omega;
}

}  // namespace detail

/// ω_t = γ^t ρ(τ_{0:t}) Σ_{l≤t} ‖∇ log π(a_l|s_l)‖_q, using cached behavior log-probabilities.
template <class Policy, class S, class A>
std::vector<double> gamps_transition_weights(const Trajectory<S, A>& traj, const Policy& pi, double gamma,
                                             QNorm q = QNorm::kTwo) {
  check_discount(gamma);
  return detail::transition_weights_from_rho(traj, pi, prefix_importance_weights(traj, pi).rho, gamma, q);
}

template <class Policy, class BehaviorPolicy, class S, class A>
std::vector<double> gamps_transition_weights(const Trajectory<S, A>& traj, const Policy& pi,
                                             const BehaviorPolicy& pi_b, double gamma, QNorm q = QNorm::kTwo) {
  check_discount(gamma);
  return detail::transition_weights_from_rho(traj, pi, prefix_importance_weights(traj, pi, pi_b).rho, gamma, q);
}

/// Per-trajectory ω sequences for a whole dataset.
template <class Policy, class S, class A>
std::vector<std::vector<double>> gamps_dataset_weights(const Dataset<S, A>& data, const Policy& pi, double gamma,
                                                       QNorm q = QNorm::kTwo) {
  std::vector<std::vector<double>> out;
  out.reserve(data.size());
  for (const auto& traj : data.trajectories) {
    out.push_back(gamps_transition_weights(traj, pi, gamma, q));
  }
  return out;
}

/// Unit weight for every transition (the maximum-likelihood objective).
template <class S, class A>
std::vector<std::vector<double>> uniform_dataset_weights(const Dataset<S, A>& data) {
  std::vector<std::vector<double>> out;
  out.reserve(data.size());
  for (const auto& traj : data.trajectories) {
    out.emplace_back(traj.size(), 1.0);
  }
  return out;
}

/// Full-trajectory weights ρ(τ_{0:T-1}), one per trajectory (1 for empty trajectories).
template <class Policy, class S, class A>
std::vector<double> trajectory_importance_weights(const Dataset<S, A>& data, const Policy& pi) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& traj : data.trajectories) {
    const auto w = prefix_importance_weights(traj, pi);
    out.push_back(w.rho.empty() ? 1.0 : w.rho.back());
  }
  return out;
}

/// (Σw)² / Σw².
inline double effective_sample_size(std::span<const double> weights) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw ValidationError("effective_sample_size: weights must be finite and nonnegative");
    }
    sum += w;
    sum_sq += w * w;
  }
  if (sum_sq == 0.0) {
    throw ZeroWeightsError("effective_sample_size: all weights are zero");
  }
  return sum * sum / sum_sq;
}

/// η over S x A with its normalizer Z (the expected score magnitude).
struct EtaDistribution {
  Matrix eta;
  double z{0.0};
  bool zero_gradient{false};  ///< Z = 0: the policy gradient vanishes and η is undefined
};

/// ‖score(s,a)‖_q for every pair of a tabular policy.
template <class Policy>
Matrix score_norm_table(const Policy& policy, int n_states, int n_actions, QNorm q) {
  Matrix norms(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      norms(s, a) = score_qnorm(policy, s, a, q);
    }
  }
  return norms;
}

/// Exact η(s,a) = Σ ν(s',a') δ_{s',a'}(s,a) with ν ∝ δ_μ ‖score‖_q, via linear solves.
template <class Policy>
EtaDistribution exact_eta_tabular(const TabularMdp& mdp, const Policy& policy, QNorm q = QNorm::kTwo) {
  const Matrix& pi = policy.probabilities();
  const Matrix occ = exact_occupancy(mdp, pi);
  const Matrix norms = score_norm_table(policy, mdp.n_states, mdp.n_actions, q);
  EtaDistribution out;
  out.z = occ.cwiseProduct(norms).sum();
  out.eta = Matrix::Zero(mdp.n_states, mdp.n_actions);
  if (!(out.z > 0.0)) {
    out.z = 0.0;
    out.zero_gradient = true;
    return out;
  }
  Vector nu(mdp.n_pairs());
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      nu(mdp.pair(s, a)) = occ(s, a) * norms(s, a) / out.z;
    }
  }
  const Vector flat = discounted_pair_distribution(mdp.kernel, pi, mdp.discount, nu);
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      out.eta(s, a) = std::max(0.0, flat(mdp.pair(s, a)));
    }
  }
  return out;
}

/// Per-pair sums of ω_t over a tabular dataset, normalized to a distribution.
template <class Policy, class A>
Matrix empirical_eta(const Dataset<int, A>& data, const Policy& pi, double gamma, QNorm q, int n_states,
                     int n_actions) {
  if (data.empty() || data.transitions() == 0) {
    throw ValidationError("empirical_eta: empty dataset");
  }
  Matrix table = Matrix::Zero(n_states, n_actions);
  for (const auto& traj : data.trajectories) {
    const auto omega = gamps_transition_weights(traj, pi, gamma, q);
    for (std::size_t t = 0; t < traj.size(); ++t) {
      table(traj.steps[t].state, static_cast<int>(traj.steps[t].action)) += omega[t];
    }
  }
  const double total = table.sum();
  if (!(total > 0.0)) {
    throw ZeroWeightsError("empirical_eta: all gradient-aware weights are zero");
  }
  return table / total;
}

}  // namespace gamps

#endif  // GAMPS_WEIGHTING_HPP
