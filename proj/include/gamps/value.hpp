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

#ifndef GAMPS_VALUE_HPP
#define GAMPS_VALUE_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>
#include <utility>
#include <vector>

#include "gamps/error.hpp"
#include "gamps/mdp.hpp"
#include "gamps/random.hpp"

namespace gamps {

/// Q^{π,p} for a tabular kernel by solving (I - γ P Π) q = r.
/// `kernel` is (S*A) x S, `pi` and `reward` are S x A. Returns an S x A table.
inline Matrix exact_q(const Matrix& kernel, const Matrix& pi, const Matrix& reward, double gamma) {
  check_discount(gamma);
  const auto n_states = pi.rows();
  const auto n_actions = pi.cols();
  if (reward.rows() != n_states || reward.cols() != n_actions || kernel.rows() != n_states * n_actions ||
      kernel.cols() != n_states) {
    throw ValidationError("exact_q: kernel, policy and reward shapes disagree");
  }
  for (Eigen::Index row = 0; row < kernel.rows(); ++row) {
    if ((kernel.row(row).array() < 0.0).any() || std::abs(kernel.row(row).sum() - 1.0) > 1e-9) {
      throw ValidationError("exact_q: kernel row " + std::to_string(row) + " is not a distribution");
    }
  }
  Vector r(n_states * n_actions);
  for (Eigen::Index s = 0; s < n_states; ++s) {
    for (Eigen::Index a = 0; a < n_actions; ++a) {
      r(s * n_actions + a) = reward(s, a);
    }
  }
  const Matrix m = pair_transition(kernel, pi);
  const Matrix system = Matrix::Identity(m.rows(), m.cols()) - gamma * m;
  const Vector q = Eigen::PartialPivLU<Matrix>(system).solve(r);
  const double residual = (system * q - r).cwiseAbs().maxCoeff();
  if (!q.allFinite() || residual > 1e-10 * std::max(1.0, q.cwiseAbs().maxCoeff())) {
    throw RuntimeError("exact_q: Bellman system solve failed (residual " + std::to_string(residual) + ")");
  }
  Matrix table(n_states, n_actions);
  for (Eigen::Index s = 0; s < n_states; ++s) {
    for (Eigen::Index a = 0; a < n_actions; ++a) {
      table(s, a) = q(s * n_actions + a);
    }
  }
  return table;
}

inline Matrix exact_q(const TabularMdp& mdp, const Matrix& pi) {
  return exact_q(mdp.kernel, pi, mdp.reward, mdp.discount);
}

/// max |r + γ P Π Q - Q|.
inline double bellman_residual(const Matrix& kernel, const Matrix& pi, const Matrix& reward, double gamma,
                               const Matrix& q) {
  const auto n_actions = pi.cols();
  const Vector v = (pi.cwiseProduct(q)).rowwise().sum();
  double worst = 0.0;
  for (Eigen::Index row = 0; row < kernel.rows(); ++row) {
    const double target = reward(row / n_actions, row % n_actions) + gamma * kernel.row(row).dot(v);
    worst = std::max(worst, std::abs(target - q(row / n_actions, row % n_actions)));
  }
  return worst;
}

struct RolloutQConfig {
  int rollouts{10};  ///< M
  int horizon{20};   ///< H

  void validate() const {
    if (rollouts < 1 || horizon < 1) {
      throw ValidationError("rollout config: M and H must be >= 1");
    }
  }
};

/// A transition model with known reward: `sim(s, a, rng)` samples an Outcome.
template <class F, class State, class Action>
concept Simulator = requires(F f, const State& s, const Action& a, Rng& rng) {
  { f(s, a, rng) } -> std::convertible_to<Outcome<State>>;
};

struct McEstimate {
  double mean{0.0};
  double std_error{0.0};
};

/// Averages M truncated discounted returns of rollouts whose first step is
/// forced to (s, a) and whose later actions follow `policy`.
template <class State, class Action, class Policy, Simulator<State, Action> Sim>
McEstimate mc_q_estimate(Sim&& sim, const Policy& policy, const State& s, const Action& a,
                         const RolloutQConfig& cfg, double gamma, Rng& rng) {
  cfg.validate();
  check_discount(gamma);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int j = 0; j < cfg.rollouts; ++j) {
    State state = s;
    Action action = a;
    double ret = 0.0;
    double discount = 1.0;
    for (int t = 0; t < cfg.horizon; ++t) {
      if (t > 0) {
        action = policy.sample(state, rng);
      }
      const Outcome<State> out = sim(state, action, rng);
      ret += discount * out.reward;
      if (out.done) {
        break;
      }
      discount *= gamma;
      state = out.next;
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  const double m = static_cast<double>(cfg.rollouts);
  McEstimate est;
  est.mean = sum / m;
  if (cfg.rollouts > 1) {
    const double var = std::max(0.0, (sum_sq - m * est.mean * est.mean) / (m - 1.0));
    est.std_error = std::sqrt(var / m);
  }
  return est;
}

template <class State, class Action, class Policy, Simulator<State, Action> Sim>
double mc_q(Sim&& sim, const Policy& policy, const State& s, const Action& a, const RolloutQConfig& cfg,
            double gamma, Rng& rng) {
  return mc_q_estimate(std::forward<Sim>(sim), policy, s, a, cfg, gamma, rng).mean;
}

/// Samples transitions of a tabular kernel with a known reward table.
/// States listed in `absorbing` end the rollout after their reward is paid.
class TabularSimulator {
 public:
  TabularSimulator(Matrix kernel, Matrix reward, std::vector<bool> absorbing = {})
      : kernel_{std::move(kernel)}, reward_{std::move(reward)}, absorbing_{std::move(absorbing)} {
    if (kernel_.rows() != reward_.size() || kernel_.cols() != reward_.rows()) {
      throw ValidationError("TabularSimulator: kernel and reward shapes disagree");
    }
    if (absorbing_.empty()) {
      absorbing_.assign(static_cast<std::size_t>(reward_.rows()), false);
    }
  }

  Outcome<int> operator()(int s, int a, Rng& rng) const {
    const auto row = kernel_.row(s * reward_.cols() + a);
    const double u = uniform01(rng);
    double cumulative = 0.0;
    int next = static_cast<int>(row.size()) - 1;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      cumulative += row(j);
      if (u < cumulative) {
        next = static_cast<int>(j);
        break;
      }
    }
    return {next, reward_(s, a), absorbing_[static_cast<std::size_t>(s)]};
  }

 private:
  Matrix kernel_;
  Matrix reward_;
  std::vector<bool> absorbing_;
};

/// Mean over all (s, a) of the squared difference.
inline double q_mse(const Matrix& q_hat, const Matrix& q_ref) {
  if (q_hat.rows() != q_ref.rows() || q_hat.cols() != q_ref.cols()) {
    throw ValidationError("q_mse: table shapes differ");
  }
  if (q_hat.size() == 0) {
    throw ValidationError("q_mse: empty tables");
  }
  return (q_hat - q_ref).squaredNorm() / static_cast<double>(q_hat.size());
}

}  // namespace gamps

#endif  // GAMPS_VALUE_HPP
