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

#ifndef GAMPS_GRADIENT_HPP
#define GAMPS_GRADIENT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gamps/error.hpp"
#include "gamps/mdp.hpp"
#include "gamps/models.hpp"
#include "gamps/policies.hpp"
#include "gamps/value.hpp"
#include "gamps/weighting.hpp"

/**
 * \file
 * \brief Sample policy-gradient estimators, the exact tabular gradient and
 * the model-bias bounds.
 */

namespace gamps {

enum class GradientKind { kMvg, kReinforce, kPgt, kExact };

inline std::string to_string(GradientKind kind) {
  switch (kind) {
    case GradientKind::kMvg:
      return "mvg";
    case GradientKind::kReinforce:
      return "reinforce";
    case GradientKind::kPgt:
      return "pgt";
    case GradientKind::kExact:
      return "exact";
  }
  return "?";
}

struct GradientEstimate {
  Vector value;
  GradientKind kind{GradientKind::kMvg};
  double ess{0.0};  ///< ESS of the full-trajectory importance weights
  std::size_t n{0};
  Vector std_error;  ///< per-component standard error of the mean
};

namespace detail {

/// Running mean and standard error of per-trajectory contributions.
class ContributionStats {
 public:
  explicit ContributionStats(Eigen::Index dim) : sum_{Vector::Zero(dim)}, sum_sq_{Vector::Zero(dim)} {}

  void add(const Vector& c) {
    sum_ += c;
    sum_sq_ += c.cwiseProduct(c);
    ++n_;
  }

  [[nodiscard]] GradientEstimate finish(GradientKind kind, double ess) const {
    GradientEstimate est;
    est.kind = kind;
    est.n = n_;
    est.ess = ess;
    const double n = static_cast<double>(n_);
    est.value = sum_ / n;
    est.std_error = Vector::Zero(sum_.size());
    if (n_ > 1) {
      const Vector var = ((sum_sq_ - n * est.value.cwiseProduct(est.value)) / (n - 1.0)).cwiseMax(0.0);
      est.std_error = (var / n).cwiseSqrt();
    }
    if (!est.value.allFinite()) {
      throw RuntimeError("gradient estimate is not finite");
    }
    return est;
  }

 private:
  Vector sum_;
  Vector sum_sq_;
  std::size_t n_{0};
};

inline double ess_or_zero(const std::vector<double>& w) {
  try {
    return effective_sample_size(w);
  } catch (const ZeroWeightsError&) {
    return 0.0;
  }
}

template <class S, class A>
void require_data(const Dataset<S, A>& data) {
  if (data.empty()) {
    throw ValidationError("gradient: empty dataset");
  }
}

template <class Policy, class S, class A, class Behavior>
PrefixWeights prefix_for(const Trajectory<S, A>& traj, const Policy& pi, const Behavior* pi_b) {
  return pi_b == nullptr ? prefix_importance_weights(traj, pi) : prefix_importance_weights(traj, pi, *pi_b);
}

template <class Policy, class S, class A, class QProvider, class Behavior>
GradientEstimate mvg_impl(const Dataset<S, A>& data, const Policy& pi, const Behavior* pi_b, QProvider&& q,
                          double gamma) {
  check_discount(gamma);
  require_data(data);
  ContributionStats stats(pi.num_params());
  std::vector<double> full;
  full.reserve(data.size());
  Vector c(pi.num_params());
  for (const auto& traj : data.trajectories) {
    const auto w = prefix_for(traj, pi, pi_b);
    c.setZero();
    double discount = 1.0;
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const auto& step = traj.steps[t];
      if (w.rho[t] != 0.0) {
        pi.accumulate_score(step.state, step.action, discount * w.rho[t] * q(step.state, step.action), c);
      }
      discount *= gamma;
    }
    stats.add(c);
    full.push_back(w.rho.empty() ? 1.0 : w.rho.back());
  }
  return stats.finish(GradientKind::kMvg, ess_or_zero(full));
}

template <class Policy, class S, class A, class Behavior>
GradientEstimate reinforce_impl(const Dataset<S, A>& data, const Policy& pi, const Behavior* pi_b, double gamma) {
  check_discount(gamma);
  require_data(data);
  ContributionStats stats(pi.num_params());
  std::vector<double> full;
  full.reserve(data.size());
  Vector c(pi.num_params());
  for (const auto& traj : data.trajectories) {
    const auto w = prefix_for(traj, pi, pi_b);
    const double rho = w.rho.empty() ? 1.0 : w.rho.back();
    const double ret = discounted_return(traj, gamma);
    c.setZero();
    if (rho != 0.0) {
      for (const auto& step : traj.steps) {
        pi.accumulate_score(step.state, step.action, rho * ret, c);
      }
    }
    stats.add(c);
    full.push_back(rho);
  }
  return stats.finish(GradientKind::kReinforce, ess_or_zero(full));
}

template <class Policy, class S, class A, class Behavior>
GradientEstimate pgt_impl(const Dataset<S, A>& data, const Policy& pi, const Behavior* pi_b, double gamma) {
  check_discount(gamma);
  require_data(data);
  ContributionStats stats(pi.num_params());
  std::vector<double> full;
  full.reserve(data.size());
  Vector c(pi.num_params());
  std::vector<double> future;
  for (const auto& traj : data.trajectories) {
    const auto w = prefix_for(traj, pi, pi_b);
    const std::size_t n = traj.size();
    // future[t] = Σ_{l≥t} γ^l ρ(τ_{0:l}) r_l
    future.assign(n + 1, 0.0);
    std::vector<double> discounts(n, 1.0);
    for (std::size_t t = 1; t < n; ++t) {
      discounts[t] = discounts[t - 1] * gamma;
    }
    for (std::size_t t = n; t-- > 0;) {
      future[t] = future[t + 1] + discounts[t] * w.rho[t] * traj.steps[t].reward;
    }
    c.setZero();
    for (std::size_t t = 0; t < n; ++t) {
      if (w.rho[t] != 0.0) {
        pi.accumulate_score(traj.steps[t].state, traj.steps[t].action, future[t], c);
      }
    }
    stats.add(c);
    full.push_back(w.rho.empty() ? 1.0 : w.rho.back());
  }
  return stats.finish(GradientKind::kPgt, ess_or_zero(full));
}

}  // namespace detail

/// (1/N) Σ_i Σ_t γ^t ρ(τ_{0:t}) ∇log π(a_t|s_t) Q(s_t,a_t), with Q supplied by
/// `q(s, a)`. Behavior probabilities come from the dataset.
template <class Policy, class S, class A, class QProvider>
GradientEstimate mvg_gradient(const Dataset<S, A>& data, const Policy& pi, QProvider&& q, double gamma) {
  return detail::mvg_impl(data, pi, static_cast<const Policy*>(nullptr), std::forward<QProvider>(q), gamma);
}

/// As above with behavior probabilities re-evaluated from `pi_b`.
template <class Policy, class Behavior, class S, class A, class QProvider>
GradientEstimate mvg_gradient(const Dataset<S, A>& data, const Policy& pi, const Behavior& pi_b, QProvider&& q,
                              double gamma) {
  return detail::mvg_impl(data, pi, &pi_b, std::forward<QProvider>(q), gamma);
}

/// (1/N) Σ_i ρ(τ^i) (Σ_t ∇log π(a_t|s_t)) (Σ_t γ^t r_t), no baseline.
template <class Policy, class S, class A>
GradientEstimate reinforce_gradient(const Dataset<S, A>& data, const Policy& pi, double gamma) {
  return detail::reinforce_impl(data, pi, static_cast<const Policy*>(nullptr), gamma);
}

template <class Policy, class Behavior, class S, class A>
GradientEstimate reinforce_gradient(const Dataset<S, A>& data, const Policy& pi, const Behavior& pi_b, double gamma) {
  return detail::reinforce_impl(data, pi, &pi_b, gamma);
}

/// (1/N) Σ_i Σ_t ∇log π(a_t|s_t) Σ_{l≥t} γ^l ρ(τ_{0:l}) r_l.
template <class Policy, class S, class A>
GradientEstimate pgt_gradient(const Dataset<S, A>& data, const Policy& pi, double gamma) {
  return detail::pgt_impl(data, pi, static_cast<const Policy*>(nullptr), gamma);
}

template <class Policy, class Behavior, class S, class A>
GradientEstimate pgt_gradient(const Dataset<S, A>& data, const Policy& pi, const Behavior& pi_b, double gamma) {
  return detail::pgt_impl(data, pi, &pi_b, gamma);
}

/// J(θ) = Σ_s μ(s) Σ_a π(a|s) Q(s,a).
template <class Policy>
double expected_return_tabular(const TabularMdp& mdp, const Policy& policy) {
  const Matrix& pi = policy.probabilities();
  const Matrix q = exact_q(mdp, pi);
  return mdp.initial.dot(pi.cwiseProduct(q).rowwise().sum());
}

/// (1/(1-γ)) Σ δ(s,a) ∇log π(a|s) q(s,a) for a given Q table.
template <class Policy>
Vector occupancy_weighted_score(const TabularMdp& mdp, const Policy& policy, const Matrix& q) {
  const Matrix occ = exact_occupancy(mdp, policy.probabilities());
  Vector g = Vector::Zero(policy.num_params());
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      policy.accumulate_score(s, a, occ(s, a) * q(s, a), g);
    }
  }
  return g / (1.0 - mdp.discount);
}

/// Exact policy gradient on a tabular MDP.
template <class Policy>
Vector exact_gradient_tabular(const TabularMdp& mdp, const Policy& policy) {
  return occupancy_weighted_score(mdp, policy, exact_q(mdp, policy.probabilities()));
}

/// Exact MVG: true occupancy, Q computed under the kernel `p_hat`.
template <class Policy>
Vector exact_mvg_tabular(const TabularMdp& mdp, const Matrix& p_hat, const Policy& policy) {
  return occupancy_weighted_score(mdp, policy,
                                  exact_q(p_hat, policy.probabilities(), mdp.reward, mdp.discount));
}

/// g·ĝ / max(‖g‖‖ĝ‖, 1e-8).
inline double cosine_similarity(const Vector& g, const Vector& g_hat) {
  if (g.size() != g_hat.size()) {
    throw ValidationError("cosine_similarity: dimension mismatch");
  }
  return g.dot(g_hat) / std::max(g.norm() * g_hat.norm(), 1e-8);
}

struct BoundReport {
  double lhs{0.0};              ///< ‖∇J - ∇^MVG J‖_q
  double rhs_theorem1{0.0};     ///< γ√2 Z Rmax/(1-γ)² sqrt(E_η KL)
  double rhs_proposition{0.0};  ///< γ√2 K Rmax/(1-γ)² sqrt(E_δ KL)
  double rhs_theorem1_scaled{0.0};  ///< rhs_theorem1 / (1-γ)
  double z{0.0};
  double k{0.0};
  double kl_eta{0.0};    ///< E_η KL
  double kl_delta{0.0};  ///< E_δ KL
};

namespace detail {

/// Σ w·kl, skipping zero-weight entries so unreachable infinite KL terms do not poison the sum.
inline double weighted_kl(const Matrix& weights, const Matrix& kl) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights(i) > 0.0) {
      acc += weights(i) * kl(i);
    }
  }
  return acc;
}

}  // namespace detail

/// Evaluates the gradient bias of the MVG under `p_hat` against the two KL bounds.
template <class Policy>
BoundReport mvg_bias_bound(const TabularMdp& mdp, const Matrix& p_hat, const Policy& policy, QNorm q = QNorm::kTwo) {
  mdp.validate(1e-9);
  if (p_hat.rows() != mdp.kernel.rows() || p_hat.cols() != mdp.kernel.cols()) {
    throw ValidationError("mvg_bias_bound: model kernel shape mismatch");
  }
  BoundReport report;
  const double gamma = mdp.discount;
  const Vector diff = exact_gradient_tabular(mdp, policy) - exact_mvg_tabular(mdp, p_hat, policy);
  report.lhs = lq_norm(diff, q);
  const Matrix norms = score_norm_table(policy, mdp.n_states, mdp.n_actions, q);
  report.k = norms.maxCoeff();
  const EtaDistribution eta = exact_eta_tabular(mdp, policy, q);
  report.z = eta.z;
  if (eta.zero_gradient) {
    return report;
  }
  const Matrix kl = kl_to_true(mdp.kernel, p_hat, mdp.n_actions);
  const Matrix occ = exact_occupancy(mdp, policy.probabilities());
  report.kl_eta = detail::weighted_kl(eta.eta, kl);
  report.kl_delta = detail::weighted_kl(occ, kl);
  const double scale = gamma * std::sqrt(2.0) * mdp.max_abs_reward() / ((1.0 - gamma) * (1.0 - gamma));
  report.rhs_theorem1 = scale * report.z * std::sqrt(report.kl_eta);
  report.rhs_proposition = scale * report.k * std::sqrt(report.kl_delta);
  report.rhs_theorem1_scaled = report.rhs_theorem1 / (1.0 - gamma);
  return report;
}

}  // namespace gamps

#endif  // GAMPS_GRADIENT_HPP
