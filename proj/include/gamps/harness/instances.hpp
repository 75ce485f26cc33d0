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

#ifndef GAMPS_HARNESS_INSTANCES_HPP
#define GAMPS_HARNESS_INSTANCES_HPP

#include <cmath>
#include <utility>

#include "gamps/mdp.hpp"
#include "gamps/policies.hpp"
#include "gamps/random.hpp"

namespace gamps {

/// Uniform draw from the probability simplex of dimension `n`.
inline Vector random_simplex(int n, Rng& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    double u = uniform01(rng);
    while (u <= 0.0) {
      u = uniform01(rng);
    }
    v(i) = -std::log(u);
  }
  return v / v.sum();
}

/// A random finite MDP with a full-support softmax policy and a perturbed
/// model p̂ = (1 - ε) p + ε q, q random.
struct RandomInstance {
  TabularMdp mdp;
  TabularSoftmaxPolicy policy;
  Matrix p_hat;
};

inline RandomInstance random_instance(Rng& rng, int max_states, int max_actions, double max_perturbation = 1.0) {
  const int n_states = 2 + static_cast<int>(uniform01(rng) * (max_states - 1));
  const int n_actions = 2 + static_cast<int>(uniform01(rng) * (max_actions - 1));
  TabularMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.discount = 0.5 + 0.49 * uniform01(rng);
  mdp.kernel.resize(n_states * n_actions, n_states);
  Matrix p_hat(n_states * n_actions, n_states);
  for (int row = 0; row < n_states * n_actions; ++row) {
    mdp.kernel.row(row) = random_simplex(n_states, rng).transpose();
    const double eps = max_perturbation * uniform01(rng);
    p_hat.row(row) = (1.0 - eps) * mdp.kernel.row(row) + eps * random_simplex(n_states, rng).transpose();
  }
  mdp.reward.resize(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      mdp.reward(s, a) = 2.0 * uniform01(rng) - 1.0;
    }
  }
  mdp.initial = random_simplex(n_states, rng);
  Vector logits(n_states * n_actions);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    logits(i) = 2.0 * standard_normal(rng);
  }
  return {std::move(mdp), TabularSoftmaxPolicy(n_states, n_actions, logits), std::move(p_hat)};
}

}  // namespace gamps

#endif  // GAMPS_HARNESS_INSTANCES_HPP
