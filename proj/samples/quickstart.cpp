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

// Fits a maximum-likelihood and a gradient-aware model on one gridworld
// dataset and compares the gradients they induce with the exact one.

#include <cstdio>

#include "gamps/envs/gridworld.hpp"
#include "gamps/gradient.hpp"
#include "gamps/models.hpp"
#include "gamps/value.hpp"
#include "gamps/weighting.hpp"

int main() {
  using namespace gamps;
  const TwoAreasGridworld env;
  const TabularMdp mdp = env.true_kernel();
  Rng rng = derive_rng(7, 0);
  const auto pi = env.initial_policy(rng, 0.3);
  const auto train = collect_dataset(env, pi, 1000, 50, 1);
  const auto val = collect_dataset(env, pi, 1000, 50, 2);
  const Vector g = exact_gradient_tabular(mdp, pi);

  for (const bool aware : {false, true}) {
    const auto w = aware ? gamps_dataset_weights(train, pi, mdp.discount) : uniform_dataset_weights(train);
    const auto [model, report] = fit_weighted(env, train, w, FitConfig{});
    const Matrix kernel = export_tabular_kernel(model, env);
    const Matrix q = exact_q(kernel, pi.probabilities(), mdp.reward, mdp.discount);
    const auto est = mvg_gradient(val, pi, [&](int s, int a) { return q(s, a); }, mdp.discount);
    std::printf("%-5s accuracy %.3f  cosine %.3f  (fit: %d epochs)\n", aware ? "GAMPS" : "ML",
                model_accuracy(kernel, mdp.n_actions, val), cosine_similarity(g, est.value), report.epochs);
  }
  return 0;
}
