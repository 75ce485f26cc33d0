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

#ifndef GAMPS_OPTIM_HPP
#define GAMPS_OPTIM_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gamps/error.hpp"
#include "gamps/mdp.hpp"

namespace gamps {

struct AdamConfig {
  double alpha{0.001};
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-8};
};

/// Moment estimates and step counter of an Adam run.
struct AdamState {
  Vector m;
  Vector v;
  long t{0};
  AdamConfig config;

  AdamState() = default;
  AdamState(Eigen::Index dim, AdamConfig cfg) : m{Vector::Zero(dim)}, v{Vector::Zero(dim)}, config{cfg} {}
};

/// One Adam update with bias correction. With `ascent` the parameters move
/// along +grad (maximization), otherwise along -grad.
inline std::pair<Vector, AdamState> adam_step(AdamState state, const Vector& params, const Vector& grad,
                                              bool ascent) {
  if (params.size() != grad.size() || state.m.size() != grad.size() || state.v.size() != grad.size()) {
    throw ValidationError("adam_step: dimension mismatch");
  }
  if (!grad.allFinite()) {
    throw RuntimeError("adam_step: non-finite gradient");
  }
  const auto& c = state.config;
  const Vector g = ascent ? Vector(-grad) : grad;
  state.t += 1;
  state.m = c.beta1 * state.m + (1.0 - c.beta1) * g;
  state.v = c.beta2 * state.v + (1.0 - c.beta2) * g.cwiseProduct(g);
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  Vector next = params;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double m_hat = state.m(i) / bc1;
    const double v_hat = state.v(i) / bc2;
    next(i) -= c.alpha * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
  return {std::move(next), std::move(state)};
}

/// Step sizes α_k per outer iteration; the last entry repeats if the run is longer.
struct StepSchedule {
  std::vector<double> alphas{0.001};

  static StepSchedule constant(double alpha) {
    if (!(alpha > 0.0)) {
      throw ValidationError("step size must be positive");
    }
    return {{alpha}};
  }
  [[nodiscard]] double at(std::size_t k) const {
    if (alphas.empty()) {
      throw ValidationError("empty step schedule");
    }
    return alphas[std::min(k, alphas.size() - 1)];
  }
};

/// Named Adam presets for the two benchmark domains.
inline AdamConfig adam_preset(std::string_view name) {
  if (name == "gridworld-policy") {
    return {0.2, 0.9, 0.999, 1e-8};
  }
  if (name == "gridworld-model") {
    return {0.01, 0.9, 0.999, 1e-8};
  }
  if (name == "minigolf-policy") {
    return {0.08, 0.0, 0.999, 1e-8};
  }
  if (name == "minigolf-model") {
    return {0.02, 0.9, 0.999, 1e-8};
  }
  throw ValidationError("unknown optimizer preset '" + std::string(name) + "'");
}

}  // namespace gamps

#endif  // GAMPS_OPTIM_HPP
