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

#ifndef GAMPS_TESTS_HELPERS_HPP
#define GAMPS_TESTS_HELPERS_HPP

#include <cmath>
#include <functional>

#include "gamps/harness/instances.hpp"
#include "gamps/mdp.hpp"
#include "gamps/policies.hpp"
#include "gamps/random.hpp"

namespace gamps::testing {

/// Random MDP with exactly `n_states` states and `n_actions` actions.
inline TabularMdp random_mdp(Rng& rng, int n_states, int n_actions, double gamma) {
  TabularMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.discount = gamma;
  mdp.kernel.resize(n_states * n_actions, n_states);
  for (int row = 0; row < n_states * n_actions; ++row) {
    mdp.kernel.row(row) = random_simplex(n_states, rng).transpose();
  }
  mdp.reward.resize(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      mdp.reward(s, a) = 2.0 * uniform01(rng) - 1.0;
    }
  }
  mdp.initial = random_simplex(n_states, rng);
  return mdp;
}

inline TabularSoftmaxPolicy random_softmax(Rng& rng, int n_states, int n_actions, double scale = 1.0) {
  Vector logits(n_states * n_actions);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    logits(i) = scale * standard_normal(rng);
  }
  return {n_states, n_actions, logits};
}

/// Central differences of a scalar function of a parameter vector.
inline Vector finite_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector up = x;
    Vector down = x;
    up(i) += h;
    down(i) -= h;
    g(i) = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - b_i| / max(1, max |b|).
inline double relative_error(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

/// Tabular MDP as an environment. States in `absorbing` end episodes.
class TabularEnv {
 public:
  using State = int;
  using Action = int;

  explicit TabularEnv(TabularMdp mdp) : mdp_{std::move(mdp)} {}

  [[nodiscard]] int initial_state(Rng& rng) const { return draw(mdp_.initial, rng); }
  [[nodiscard]] Outcome<int> step(int s, int a, Rng& rng) const {
    const Vector row = mdp_.kernel.row(mdp_.pair(s, a)).transpose();
    return {draw(row, rng), mdp_.reward(s, a), false};
  }
  [[nodiscard]] const TabularMdp& mdp() const { return mdp_; }

 private:
  static int draw(const Vector& p, Rng& rng) {
    const double u = uniform01(rng);
    double c = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      c += p(i);
      if (u < c) {
        return static_cast<int>(i);
      }
    }
    return static_cast<int>(p.size()) - 1;
  }

  TabularMdp mdp_;
};

}  // namespace gamps::testing

#endif  // GAMPS_TESTS_HELPERS_HPP
