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

#ifndef GAMPS_ENVS_MINIGOLF_HPP
#define GAMPS_ENVS_MINIGOLF_HPP

#include <algorithm>
#include <cmath>

#include "gamps/error.hpp"
#include "gamps/mdp.hpp"
#include "gamps/random.hpp"

namespace gamps {

/// Minigolf constants in meters and seconds. The hole, ball and putter sizes
/// are not fixed by the domain description and are configurable.
struct MinigolfConfig {
  double max_distance{20.0};
  double friction_near{0.131};
  double friction_far{0.19};
  double gravity{9.81};
  double putter_length{1.0};
  double hole_diameter{0.10};
  double ball_radius{0.02135};
  double noise_std{0.3};
  bool noise{true};  ///< false gives the noiseless test mode
  int horizon{20};
  double discount{0.99};
};

/// One-dimensional putting task. The state is the distance to the hole; the
/// action is the nominal putter angular speed.
class Minigolf {
 public:
  using State = double;
  using Action = double;

  static constexpr double kHoleReward = 0.0;
  static constexpr double kStrokeReward = -1.0;
  static constexpr double kOvershootReward = -100.0;

  explicit Minigolf(MinigolfConfig config = {}) : config_{config} {
    if (!(config_.max_distance > 0.0) || !(config_.gravity > 0.0) || !(config_.putter_length > 0.0)) {
      throw ValidationError("minigolf: distance, gravity and putter length must be positive");
    }
    if (!(config_.friction_near > 0.0) || !(config_.friction_far > 0.0)) {
      throw ValidationError("minigolf: friction coefficients must be positive");
    }
    if (!(config_.ball_radius > 0.0) || !(config_.hole_diameter > 0.0) || !(config_.noise_std >= 0.0)) {
      throw ValidationError("minigolf: hole, ball and noise parameters out of range");
    }
    if (config_.horizon < 1) {
      throw ValidationError("minigolf: horizon must be >= 1");
    }
    check_discount(config_.discount);
  }

  [[nodiscard]] const MinigolfConfig& config() const { return config_; }

  /// The near two thirds of the course have standard friction, the rest is sand.
  [[nodiscard]] double friction(double x) const {
    return x < (2.0 / 3.0) * config_.max_distance ? config_.friction_near : config_.friction_far;
  }
  [[nodiscard]] double deceleration(double x) const { return (5.0 / 7.0) * friction(x) * config_.gravity; }
  [[nodiscard]] double v_min(double x) const { return std::sqrt(2.0 * deceleration(x) * x); }
  [[nodiscard]] double v_max(double x) const {
    const double lip = 2.0 * config_.hole_diameter - config_.ball_radius;
    const double vmin = v_min(x);
    return std::sqrt(lip * lip * config_.gravity / (2.0 * config_.ball_radius) + vmin * vmin);
  }

  /// Initial distance, uniform over (0, max_distance].
  [[nodiscard]] double initial_state(Rng& rng) const { return config_.max_distance * (1.0 - uniform01(rng)); }

  /// Resolves a shot with initial ball speed `v0` from distance `x`. The next
  /// state is the unobstructed rest position x - v0²/(2d), which is <= 0 once
  /// the ball reaches the hole.
  [[nodiscard]] Outcome<double> resolve(double x, double v0) const {
    const double d = deceleration(x);
    const double next = x - v0 * v0 / (2.0 * d);
    if (v0 < v_min(x)) {
      return {next, kStrokeReward, false};
    }
    if (v0 <= v_max(x)) {
      return {next, kHoleReward, true};
    }
    return {next, kOvershootReward, true};
  }

  /// Known reward function: outcome of a move from `x` to `next` (as
  /// predicted by a model), inverting the travelled distance to a speed.
  [[nodiscard]] Outcome<double> outcome(double x, double next) const {
    const double travelled = std::max(0.0, x - next);
    return resolve(x, std::sqrt(2.0 * deceleration(x) * travelled));
  }

  [[nodiscard]] Outcome<double> step(double x, double a, Rng& rng) const {
    if (!(x > 0.0) || !std::isfinite(a)) {
      throw ValidationError("minigolf: state must be positive and action finite");
    }
    const double eps = config_.noise ? config_.noise_std * standard_normal(rng) : 0.0;
    const double v0 = std::max(0.0, a * config_.putter_length * config_.putter_length * (1.0 + eps));
    return resolve(x, v0);
  }

 private:
  MinigolfConfig config_;
};

}  // namespace gamps

#endif  // GAMPS_ENVS_MINIGOLF_HPP
