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

#ifndef GAMPS_MDP_HPP
#define GAMPS_MDP_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gamps/error.hpp"
#include "gamps/random.hpp"

/**
 * \file
 * \brief MDP abstractions: finite MDPs, trajectories, datasets, trajectory
 * collection and discounted state-action occupancies.
 */

namespace gamps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Finite MDP. The kernel holds one row per state-action pair (row index
/// `s * n_actions + a`) and one column per next state.
struct TabularMdp {
  int n_states{0};
  int n_actions{0};
  Matrix kernel;   ///< (S*A) x S, p(s'|s,a)
  Matrix reward;   ///< S x A, r(s,a)
  Vector initial;  ///< S, μ
  double discount{0.0};

  [[nodiscard]] int pair(int s, int a) const { return s * n_actions + a; }
  [[nodiscard]] int n_pairs() const { return n_states * n_actions; }
  [[nodiscard]] double max_abs_reward() const { return reward.cwiseAbs().maxCoeff(); }

  /// Throws ValidationError if shapes are inconsistent or a distribution
  /// does not sum to one within `tol`.
  void validate(double tol = 1e-12) const {
    if (n_states <= 0 || n_actions <= 0) {
      throw ValidationError("TabularMdp: state and action counts must be positive");
    }
    if (kernel.rows() != n_pairs() || kernel.cols() != n_states) {
      throw ValidationError("TabularMdp: kernel must be (S*A) x S");
    }
    if (reward.rows() != n_states || reward.cols() != n_actions) {
      throw ValidationError("TabularMdp: reward must be S x A");
    }
    if (initial.size() != n_states) {
      throw ValidationError("TabularMdp: initial distribution must have S entries");
    }
    if (!(discount >= 0.0 && discount < 1.0)) {
      throw ValidationError("TabularMdp: discount must lie in [0, 1)");
    }
    if ((kernel.array() < 0.0).any() || (initial.array() < 0.0).any()) {
      throw ValidationError("TabularMdp: negative probability");
    }
    for (int row = 0; row < kernel.rows(); ++row) {
      if (std::abs(kernel.row(row).sum() - 1.0) > tol) {
        throw ValidationError("TabularMdp: kernel row " + std::to_string(row) + " does not sum to 1");
      }
    }
    if (std::abs(initial.sum() - 1.0) > tol) {
      throw ValidationError("TabularMdp: initial distribution does not sum to 1");
    }
    if (!reward.allFinite()) {
      throw ValidationError("TabularMdp: rewards must be finite");
    }
  }
};

/// Result of one environment transition.
template <class State>
struct Outcome {
  State next;
  double reward{0.0};
  bool done{false};
};

template <class State, class Action>
struct Step {
  State state{};
  Action action{};
  double reward{0.0};
  State next_state{};
  double behavior_logp{0.0};  ///< log π_b(a|s) at collection time

  friend bool operator==(const Step&, const Step&) = default;
};

template <class State, class Action>
struct Trajectory {
  std::vector<Step<State, Action>> steps;
  bool terminal{false};  ///< ended by reaching an absorbing state

  [[nodiscard]] std::size_t size() const { return steps.size(); }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

template <class State, class Action>
struct Dataset {
  std::vector<Trajectory<State, Action>> trajectories;
  std::string behavior_policy_id;

  [[nodiscard]] std::size_t size() const { return trajectories.size(); }
  [[nodiscard]] bool empty() const { return trajectories.empty(); }
  [[nodiscard]] std::size_t transitions() const {
    std::size_t total = 0;
    for (const auto& traj : trajectories) {
      total += traj.size();
    }
    return total;
  }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

template <class E>
concept Environment = requires(const E& env, const typename E::State& s, const typename E::Action& a, Rng& rng) {
  { env.initial_state(rng) } -> std::convertible_to<typename E::State>;
  { env.step(s, a, rng) } -> std::convertible_to<Outcome<typename E::State>>;
};

template <class P, class State, class Action>
concept SamplingPolicy = requires(const P& p, const State& s, const Action& a, Rng& rng) {
  { p.log_prob(s, a) } -> std::convertible_to<double>;
  { p.sample(s, rng) } -> std::convertible_to<Action>;
};

/// Rolls out `policy` for at most `horizon` steps. Stops early when the
/// environment reports an absorbing state. If `start` is given the episode
/// begins there instead of drawing from the initial distribution.
template <Environment Env, class Policy>
  requires SamplingPolicy<Policy, typename Env::State, typename Env::Action>
Trajectory<typename Env::State, typename Env::Action> sample_trajectory(
    const Env& env, const Policy& policy, int horizon, Rng& rng,
    std::optional<typename Env::State> start = std::nullopt) {
  if (horizon < 1) {
    throw ValidationError("sample_trajectory: horizon must be >= 1");
  }
  Trajectory<typename Env::State, typename Env::Action> traj;
  traj.steps.reserve(static_cast<std::size_t>(horizon));
  auto state = start ? *start : env.initial_state(rng);
  for (int t = 0; t < horizon; ++t) {
    const auto action = policy.sample(state, rng);
    Outcome<typename Env::State> out;
    try {
      out = env.step(state, action, rng);
    } catch (const std::exception& e) {
      throw RuntimeError("environment step " + std::to_string(t) + " failed: " + e.what());
    }
    traj.steps.push_back({state, action, out.reward, out.next, policy.log_prob(state, action)});
    if (out.done) {
      traj.terminal = true;
      break;
    }
    state = out.next;
  }
  return traj;
}

/// Collects `n` trajectories. Trajectory `i` uses its own stream derived from
/// `(seed, i)`, so the result does not depend on collection order.
template <Environment Env, class Policy>
Dataset<typename Env::State, typename Env::Action> collect_dataset(
    const Env& env, const Policy& policy, int n, int horizon, std::uint64_t seed,
    std::string behavior_policy_id = {}) {
  if (n < 1) {
    throw ValidationError("collect_dataset: n must be >= 1");
  }
  Dataset<typename Env::State, typename Env::Action> data;
  data.behavior_policy_id = std::move(behavior_policy_id);
  data.trajectories.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto rng = derive_rng(seed, static_cast<std::uint64_t>(i));
    data.trajectories.push_back(sample_trajectory(env, policy, horizon, rng));
  }
  return data;
}

inline void check_discount(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ValidationError("discount must lie in [0, 1)");
  }
}

/// Σ_t γ^t r_t over the recorded steps.
template <class State, class Action>
double discounted_return(const Trajectory<State, Action>& traj, double gamma) {
  check_discount(gamma);
  double total = 0.0;
  double discount = 1.0;
  for (const auto& step : traj.steps) {
    total += discount * step.reward;
    discount *= gamma;
  }
  return total;
}

/// Pair-to-pair transition matrix M[(s,a),(s',a')] = p(s'|s,a) π(a'|s').
inline Matrix pair_transition(const Matrix& kernel, const Matrix& pi) {
  const auto n_states = pi.rows();
  const auto n_actions = pi.cols();
  Matrix m(kernel.rows(), n_states * n_actions);
  for (Eigen::Index s2 = 0; s2 < n_states; ++s2) {
    for (Eigen::Index a2 = 0; a2 < n_actions; ++a2) {
      m.col(s2 * n_actions + a2) = kernel.col(s2) * pi(s2, a2);
    }
  }
  return m;
}

/// Solves (I - γ Mᵀ) δ = (1 - γ) start for the discounted pair distribution
/// started from the pair distribution `start`. Each column of `start` is an
/// independent right-hand side.
inline Matrix discounted_pair_distribution(const Matrix& kernel, const Matrix& pi, double gamma,
                                           const Matrix& start) {
  check_discount(gamma);
  const Matrix m = pair_transition(kernel, pi);
  const Matrix system = Matrix::Identity(m.rows(), m.cols()) - gamma * m.transpose();
  const Matrix rhs = (1.0 - gamma) * start;
  Eigen::PartialPivLU<Matrix> lu(system);
  Matrix solution = lu.solve(rhs);
  const double residual = (system * solution - rhs).cwiseAbs().maxCoeff();
  if (!solution.allFinite() || residual > 1e-10) {
    throw RuntimeError("occupancy linear system is singular (residual " + std::to_string(residual) + ")");
  }
  return solution;
}

/// δ_μ^{π,p}(s,a) = (1-γ) Σ_t γ^t Pr(s_t=s, a_t=a), as an S x A table.
inline Matrix exact_occupancy(const TabularMdp& mdp, const Matrix& pi) {
  if (pi.rows() != mdp.n_states || pi.cols() != mdp.n_actions) {
    throw ValidationError("exact_occupancy: policy table shape mismatch");
  }
  Vector start(mdp.n_pairs());
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      start(mdp.pair(s, a)) = mdp.initial(s) * pi(s, a);
    }
  }
  const Vector flat = discounted_pair_distribution(mdp.kernel, pi, mdp.discount, start);
  Matrix occ(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      occ(s, a) = std::max(0.0, flat(mdp.pair(s, a)));
    }
  }
  return occ;
}

/// Normalized γ^t-discounted visit counts of (s_t, a_t) over a tabular dataset.
template <class Action>
Matrix empirical_occupancy(const Dataset<int, Action>& data, double gamma, int n_states, int n_actions) {
  check_discount(gamma);
  if (data.empty() || data.transitions() == 0) {
    throw ValidationError("empirical_occupancy: empty dataset");
  }
  Matrix counts = Matrix::Zero(n_states, n_actions);
  for (const auto& traj : data.trajectories) {
    double discount = 1.0;
    for (const auto& step : traj.steps) {
      counts(step.state, static_cast<int>(step.action)) += discount;
      discount *= gamma;
    }
  }
  return counts / counts.sum();
}

/// Total-variation distance between two tables of the same shape.
inline double total_variation(const Matrix& p, const Matrix& q) { return 0.5 * (p - q).cwiseAbs().sum(); }

}  // namespace gamps

#endif  // GAMPS_MDP_HPP
