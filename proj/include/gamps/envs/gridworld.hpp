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

#ifndef GAMPS_ENVS_GRIDWORLD_HPP
#define GAMPS_ENVS_GRIDWORLD_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gamps/error.hpp"
#include "gamps/mdp.hpp"
#include "gamps/policies.hpp"
#include "gamps/random.hpp"

namespace gamps {

/// Movement effects, in the order used by the action-effect model.
enum Effect : int { kUp = 0, kRight = 1, kDown = 2, kLeft = 3, kStay = 4 };
inline constexpr int kNumEffects = 5;
inline constexpr int kGridActions = 4;

struct GridworldConfig {
  int width{5};
  int height{5};
  /// The deterministic ("upper") area is the top-left rectangle
  /// [0, upper_rows) x [0, upper_cols); every other cell is sticky.
  int upper_rows{2};
  int upper_cols{2};
  double success_prob{0.9};
  /// Horizontal moves in the upper area pass through its side walls.
  bool wrap{true};
  double step_reward{-1.0};
  double discount{0.99};
};

/// Two-areas gridworld. Cells are indexed row-major from the top-left corner,
/// which holds the absorbing zero-reward goal. In the sticky area action a
/// moves (right, down, left, up)[a] with probability `success_prob` and stays
/// otherwise; in the upper area the movement is deterministic and rotated,
/// (up, right, down, left)[a]. Nothing leads from the upper area back into
/// the sticky one.
class TwoAreasGridworld {
 public:
  using State = int;
  using Action = int;

  static constexpr std::array<Effect, kGridActions> kLowerEffects{kRight, kDown, kLeft, kUp};
  static constexpr std::array<Effect, kGridActions> kUpperEffects{kUp, kRight, kDown, kLeft};

  explicit TwoAreasGridworld(GridworldConfig config = {}) : config_{config} {
    if (config_.width < 2 || config_.height < 2) {
      throw ValidationError("gridworld: grid must be at least 2x2");
    }
    if (config_.upper_rows < 1 || config_.upper_rows > config_.height || config_.upper_cols < 1 ||
        config_.upper_cols > config_.width) {
      throw ValidationError("gridworld: upper area must be a non-empty sub-rectangle containing the goal");
    }
    if (!(config_.success_prob >= 0.0 && config_.success_prob <= 1.0)) {
      throw ValidationError("gridworld: success probability must lie in [0, 1]");
    }
    check_discount(config_.discount);
    for (int c = 0; c < config_.width; ++c) {
      initial_states_.push_back(cell(config_.height - 1, c));
    }
    for (int r = 0; r + 1 < config_.height; ++r) {
      initial_states_.push_back(cell(r, config_.width - 1));
    }
  }

  [[nodiscard]] const GridworldConfig& config() const { return config_; }
  [[nodiscard]] int n_states() const { return config_.width * config_.height; }
  [[nodiscard]] int n_actions() const { return kGridActions; }
  [[nodiscard]] int goal() const { return 0; }
  [[nodiscard]] int cell(int row, int col) const { return row * config_.width + col; }
  [[nodiscard]] int row(int s) const { return s / config_.width; }
  [[nodiscard]] int col(int s) const { return s % config_.width; }
  [[nodiscard]] bool is_upper(int s) const { return row(s) < config_.upper_rows && col(s) < config_.upper_cols; }
  [[nodiscard]] bool is_lower(int s) const { return !is_upper(s); }
  [[nodiscard]] const std::vector<int>& initial_states() const { return initial_states_; }

  /// Effect that action `a` attempts in state `s`.
  [[nodiscard]] Effect intended_effect(int s, int a) const {
    return is_upper(s) ? kUpperEffects.at(static_cast<std::size_t>(a)) : kLowerEffects.at(static_cast<std::size_t>(a));
  }

  /// Cell reached by applying `effect` in `s` under the area's wall rules.
  [[nodiscard]] int move(int s, int effect) const {
    if (effect == kStay) {
      return s;
    }
    static constexpr std::array<int, 4> kDr{-1, 0, 1, 0};
    static constexpr std::array<int, 4> kDc{0, 1, 0, -1};
    int r = row(s) + kDr.at(static_cast<std::size_t>(effect));
    int c = col(s) + kDc.at(static_cast<std::size_t>(effect));
    if (is_lower(s)) {
      return inside(r, c) ? cell(r, c) : s;
    }
    if (config_.wrap && (effect == kLeft || effect == kRight)) {
      c = (c + config_.upper_cols) % config_.upper_cols;
    }
    if (!inside(r, c) || is_lower(cell(r, c))) {
      return s;
    }
    return cell(r, c);
  }

  [[nodiscard]] double reward(int s, int /*a*/) const { return s == goal() ? 0.0 : config_.step_reward; }

  [[nodiscard]] int initial_state(Rng& rng) const {
    const auto n = initial_states_.size();
    auto idx = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return initial_states_[std::min(idx, n - 1)];
  }

  [[nodiscard]] Outcome<int> step(int s, int a, Rng& rng) const {
    if (s < 0 || s >= n_states() || a < 0 || a >= kGridActions) {
      throw ValidationError("gridworld: invalid state or action");
    }
    if (s == goal()) {
      return {s, 0.0, true};
    }
    int next = 0;
    if (is_upper(s)) {
      next = move(s, intended_effect(s, a));
    } else {
      next = uniform01(rng) < config_.success_prob ? move(s, intended_effect(s, a)) : s;
    }
    return {next, reward(s, a), next == goal()};
  }

  /// Exact kernel, rewards and initial distribution; the goal is a zero-reward self-loop.
  [[nodiscard]] TabularMdp true_kernel() const {
    TabularMdp mdp;
    mdp.n_states = n_states();
    mdp.n_actions = kGridActions;
    mdp.kernel = Matrix::Zero(mdp.n_pairs(), mdp.n_states);
    mdp.reward = Matrix::Zero(mdp.n_states, mdp.n_actions);
    mdp.initial = Vector::Zero(mdp.n_states);
    mdp.discount = config_.discount;
    for (int s = 0; s < n_states(); ++s) {
      for (int a = 0; a < kGridActions; ++a) {
        const int row_idx = mdp.pair(s, a);
        mdp.reward(s, a) = reward(s, a);
        if (s == goal()) {
          mdp.kernel(row_idx, s) = 1.0;
        } else if (is_upper(s)) {
          mdp.kernel(row_idx, move(s, intended_effect(s, a))) = 1.0;
        } else {
          mdp.kernel(row_idx, move(s, intended_effect(s, a))) += config_.success_prob;
          mdp.kernel(row_idx, s) += 1.0 - config_.success_prob;
        }
      }
    }
    for (const int s : initial_states_) {
      mdp.initial(s) += 1.0 / static_cast<double>(initial_states_.size());
    }
    return mdp;
  }

  /// Kernel induced by a state-independent effect distribution per action
  /// (rows of `effect_probs`, actions x effects), pushed through the same wall rules.
  [[nodiscard]] Matrix kernel_from_effects(const Matrix& effect_probs) const {
    if (effect_probs.rows() != kGridActions || effect_probs.cols() != kNumEffects) {
      throw ValidationError("gridworld: effect table must be 4 x 5");
    }
    Matrix kernel = Matrix::Zero(static_cast<Eigen::Index>(n_states()) * kGridActions, n_states());
    for (int s = 0; s < n_states(); ++s) {
      for (int a = 0; a < kGridActions; ++a) {
        const int row_idx = s * kGridActions + a;
        if (s == goal()) {
          kernel(row_idx, s) = 1.0;
          continue;
        }
        for (int e = 0; e < kNumEffects; ++e) {
          kernel(row_idx, move(s, e)) += effect_probs(a, e);
        }
      }
    }
    return kernel;
  }

  /// Effects consistent with observing s -> next (several when walls merge moves).
  [[nodiscard]] std::array<bool, kNumEffects> consistent_effects(int s, int next) const {
    std::array<bool, kNumEffects> mask{};
    for (int e = 0; e < kNumEffects; ++e) {
      mask[static_cast<std::size_t>(e)] = move(s, e) == next;
    }
    return mask;
  }

  /// Fixed action of the sticky area: go up while possible, left at the top wall.
  [[nodiscard]] int lower_area_action(int s) const { return row(s) > 0 ? 3 : 2; }

  /// Softmax policy frozen on the sticky area, with N(0, scale²) logits elsewhere.
  [[nodiscard]] TabularSoftmaxPolicy initial_policy(Rng& rng, double logit_scale) const {
    Vector logits = Vector::Zero(static_cast<Eigen::Index>(n_states()) * kGridActions);
    std::vector<std::optional<int>> frozen(static_cast<std::size_t>(n_states()));
    for (int s = 0; s < n_states(); ++s) {
      if (is_lower(s)) {
        frozen[static_cast<std::size_t>(s)] = lower_area_action(s);
        continue;
      }
      for (int a = 0; a < kGridActions; ++a) {
        logits(s * kGridActions + a) = logit_scale * standard_normal(rng);
      }
    }
    return {n_states(), kGridActions, logits, frozen};
  }

 private:
  [[nodiscard]] bool inside(int r, int c) const { return r >= 0 && r < config_.height && c >= 0 && c < config_.width; }

  GridworldConfig config_;
  std::vector<int> initial_states_;
};

}  // namespace gamps

#endif  // GAMPS_ENVS_GRIDWORLD_HPP
