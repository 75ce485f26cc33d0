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

#ifndef GAMPS_POLICIES_HPP
#define GAMPS_POLICIES_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gamps/error.hpp"
#include "gamps/mdp.hpp"
#include "gamps/random.hpp"

namespace gamps {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Supported L^q norms for score magnitudes.
enum class QNorm { kOne, kTwo, kInf };

inline QNorm parse_qnorm(std::string_view text) {
  if (text == "1") {
    return QNorm::kOne;
  }
  if (text == "2") {
    return QNorm::kTwo;
  }
  if (text == "inf" || text == "infinity") {
    return QNorm::kInf;
  }
  throw ValidationError("unsupported q-norm '" + std::string(text) + "' (expected 1, 2 or inf)");
}

inline std::string to_string(QNorm q) {
  switch (q) {
    case QNorm::kOne:
      return "1";
    case QNorm::kTwo:
      return "2";
    case QNorm::kInf:
      return "inf";
  }
  return "?";
}

inline double lq_norm(const Vector& v, QNorm q) {
  switch (q) {
    case QNorm::kOne:
      return v.lpNorm<1>();
    case QNorm::kTwo:
      return v.norm();
    case QNorm::kInf:
      return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

/// A differentiable stochastic policy over states `S` and actions `A`.
template <class P>
concept DifferentiablePolicy = requires(const P& p, const typename P::State& s, const typename P::Action& a,
                                        Rng& rng, const Vector& theta) {
  { p.log_prob(s, a) } -> std::convertible_to<double>;
  { p.score(s, a) } -> std::convertible_to<Vector>;
  { p.sample(s, rng) } -> std::convertible_to<typename P::Action>;
  { p.params() } -> std::convertible_to<Vector>;
  { p.with_params(theta) } -> std::convertible_to<P>;
  { p.num_params() } -> std::convertible_to<Eigen::Index>;
};

/// ‖∇_θ log π(a|s)‖_q.
template <DifferentiablePolicy P>
double score_qnorm(const P& policy, const typename P::State& s, const typename P::Action& a, QNorm q = QNorm::kTwo) {
  return lq_norm(policy.score(s, a), q);
}

/// Softmax policy linear in the one-hot state encoding: θ holds one logit per
/// (s, a), flattened row-major. Frozen states act deterministically and carry
/// a zero score.
class TabularSoftmaxPolicy {
 public:
  using State = int;
  using Action = int;

  TabularSoftmaxPolicy(int n_states, int n_actions, Vector logits, std::vector<std::optional<int>> frozen = {})
      : n_states_{n_states}, n_actions_{n_actions}, logits_{std::move(logits)}, frozen_{std::move(frozen)} {
    if (n_states <= 0 || n_actions <= 0) {
      throw ValidationError("TabularSoftmaxPolicy: state and action counts must be positive");
    }
    if (logits_.size() != static_cast<Eigen::Index>(n_states) * n_actions) {
      throw ValidationError("TabularSoftmaxPolicy: expected S*A logits");
    }
    if (!logits_.allFinite()) {
      throw ValidationError("TabularSoftmaxPolicy: logits must be finite");
    }
    if (frozen_.empty()) {
      frozen_.resize(static_cast<std::size_t>(n_states));
    }
    if (frozen_.size() != static_cast<std::size_t>(n_states)) {
      throw ValidationError("TabularSoftmaxPolicy: frozen table must have one entry per state");
    }
    for (const auto& f : frozen_) {
      if (f && (*f < 0 || *f >= n_actions)) {
        throw ValidationError("TabularSoftmaxPolicy: frozen action out of range");
      }
    }
    probs_.resize(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
      if (const auto& f = frozen_[static_cast<std::size_t>(s)]) {
        probs_.row(s).setZero();
        probs_(s, *f) = 1.0;
        continue;
      }
      const auto row = logits_.segment(static_cast<Eigen::Index>(s) * n_actions, n_actions);
      const Vector shifted = (row.array() - row.maxCoeff()).exp();
      probs_.row(s) = shifted.transpose() / shifted.sum();
    }
  }

  static TabularSoftmaxPolicy uniform(int n_states, int n_actions) {
    return {n_states, n_actions, Vector::Zero(static_cast<Eigen::Index>(n_states) * n_actions)};
  }

  [[nodiscard]] int n_states() const { return n_states_; }
  [[nodiscard]] int n_actions() const { return n_actions_; }
  [[nodiscard]] Eigen::Index num_params() const { return logits_.size(); }
  [[nodiscard]] const Vector& params() const { return logits_; }
  [[nodiscard]] const std::vector<std::optional<int>>& frozen() const { return frozen_; }
  [[nodiscard]] bool is_frozen(int s) const { return frozen_.at(static_cast<std::size_t>(s)).has_value(); }
  [[nodiscard]] bool all_frozen() const {
    return std::all_of(frozen_.begin(), frozen_.end(), [](const auto& f) { return f.has_value(); });
  }

  [[nodiscard]] TabularSoftmaxPolicy with_params(const Vector& theta) const {
    return {n_states_, n_actions_, theta, frozen_};
  }

  /// S x A table of action probabilities.
  [[nodiscard]] const Matrix& probabilities() const { return probs_; }
  [[nodiscard]] double prob(int s, int a) const { return probs_(s, a); }

  [[nodiscard]] double log_prob(int s, int a) const {
    check(s, a);
    const double p = probs_(s, a);
    return p > 0.0 ? std::log(p) : kNegInf;
  }

  [[nodiscard]] Vector score(int s, int a) const {
    check(s, a);
    Vector g = Vector::Zero(num_params());
    if (is_frozen(s)) {
      return g;
    }
    const auto offset = static_cast<Eigen::Index>(s) * n_actions_;
    g.segment(offset, n_actions_) = -probs_.row(s).transpose();
    g(offset + a) += 1.0;
    return g;
  }

  /// Adds `scale * score(s, a)` to `out` without materializing the score.
  void accumulate_score(int s, int a, double scale, Vector& out) const {
    if (is_frozen(s) || scale == 0.0) {
      return;
    }
    const auto offset = static_cast<Eigen::Index>(s) * n_actions_;
    out.segment(offset, n_actions_) -= scale * probs_.row(s).transpose();
    out(offset + a) += scale;
  }

  [[nodiscard]] int sample(int s, Rng& rng) const {
    check(s, 0);
    if (const auto& f = frozen_[static_cast<std::size_t>(s)]) {
      return *f;
    }
    const double u = uniform01(rng);
    double cumulative = 0.0;
    for (int a = 0; a < n_actions_; ++a) {
      cumulative += probs_(s, a);
      if (u < cumulative) {
        return a;
      }
    }
    // Rounding left u above the final partial sum: pick the last action with mass.
    for (int a = n_actions_ - 1; a >= 0; --a) {
      if (probs_(s, a) > 0.0) {
        return a;
      }
    }
    return n_actions_ - 1;
  }

 private:
  void check(int s, int a) const {
    if (s < 0 || s >= n_states_ || a < 0 || a >= n_actions_) {
      throw ValidationError("TabularSoftmaxPolicy: state or action out of range");
    }
  }

  int n_states_;
  int n_actions_;
  Vector logits_;
  std::vector<std::optional<int>> frozen_;
  Matrix probs_;
};

/// Gaussian policy with mean linear in radial basis features and a
/// state-independent standard deviation exp(log_std). θ = (mean weights, log_std).
class RbfGaussianPolicy {
 public:
  using State = double;
  using Action = double;

  RbfGaussianPolicy(Vector centers, double bandwidth, Vector mean_weights, double log_std)
      : centers_{std::move(centers)}, bandwidth_{bandwidth}, weights_{std::move(mean_weights)}, log_std_{log_std} {
    if (!(bandwidth_ > 0.0)) {
      throw ValidationError("RbfGaussianPolicy: bandwidth must be positive");
    }
    if (centers_.size() == 0 || centers_.size() != weights_.size()) {
      throw ValidationError("RbfGaussianPolicy: need one mean weight per center");
    }
    if (!weights_.allFinite() || !std::isfinite(log_std_)) {
      throw ValidationError("RbfGaussianPolicy: parameters must be finite");
    }
  }

  /// `n` centers equally spaced over [lo, hi], bandwidth equal to the spacing.
  static RbfGaussianPolicy equally_spaced(double lo, double hi, int n = 6, double mean_init = 1.0,
                                          double log_std_init = 0.0) {
    if (n < 2 || !(hi > lo)) {
      throw ValidationError("RbfGaussianPolicy: need n >= 2 centers over a non-empty range");
    }
    const Vector centers = Vector::LinSpaced(n, lo, hi);
    return {centers, (hi - lo) / (n - 1), Vector::Constant(n, mean_init), log_std_init};
  }

  [[nodiscard]] Eigen::Index num_features() const { return centers_.size(); }
  [[nodiscard]] Eigen::Index num_params() const { return centers_.size() + 1; }
  [[nodiscard]] const Vector& centers() const { return centers_; }
  [[nodiscard]] double bandwidth() const { return bandwidth_; }
  [[nodiscard]] double log_std() const { return log_std_; }
  [[nodiscard]] double stddev() const { return std::exp(log_std_); }

  [[nodiscard]] Vector params() const {
    Vector theta(num_params());
    theta << weights_, log_std_;
    return theta;
  }

  [[nodiscard]] RbfGaussianPolicy with_params(const Vector& theta) const {
    if (theta.size() != num_params()) {
      throw ValidationError("RbfGaussianPolicy: parameter size mismatch");
    }
    return {centers_, bandwidth_, theta.head(num_features()), theta(num_features())};
  }

  [[nodiscard]] Vector features(double s) const {
    const double denom = 2.0 * bandwidth_ * bandwidth_;
    return (-(centers_.array() - s).square() / denom).exp();
  }

  [[nodiscard]] double mean(double s) const { return weights_.dot(features(s)); }

  [[nodiscard]] double log_prob(double s, double a) const {
    const double z = (a - mean(s)) / stddev();
    return -0.5 * std::log(2.0 * M_PI) - log_std_ - 0.5 * z * z;
  }

  [[nodiscard]] Vector score(double s, double a) const {
    const Vector phi = features(s);
    const double var = std::exp(2.0 * log_std_);
    const double diff = a - weights_.dot(phi);
    Vector g(num_params());
    g.head(num_features()) = (diff / var) * phi;
    g(num_features()) = diff * diff / var - 1.0;
    return g;
  }

  void accumulate_score(double s, double a, double scale, Vector& out) const { out += scale * score(s, a); }

  [[nodiscard]] double sample(double s, Rng& rng) const { return mean(s) + stddev() * standard_normal(rng); }

 private:
  Vector centers_;
  double bandwidth_;
  Vector weights_;
  double log_std_;
};

}  // namespace gamps

#endif  // GAMPS_POLICIES_HPP
