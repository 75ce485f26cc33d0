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

#ifndef GAMPS_MODELS_HPP
#define GAMPS_MODELS_HPP

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "gamps/envs/gridworld.hpp"
#include "gamps/error.hpp"
#include "gamps/mdp.hpp"
#include "gamps/optim.hpp"
#include "gamps/random.hpp"

/**
 * \file
 * \brief Learnable transition models and weighted maximum-likelihood fitting.
 *
 * Both model classes are fitted by maximizing Σ_i Σ_t ω_t^i log p̄(s_{t+1}|s_t,a_t)
 * (normalized by the number of trajectories) for caller-supplied transition
 * weights ω. Unit weights give the plain maximum-likelihood model; the
 * gradient-aware weights from weighting.hpp give the decision-aware one.
 */

namespace gamps {

struct FitConfig {
  AdamConfig adam{0.01, 0.9, 0.999, 1e-8};
  int max_epochs{300};
  /// Stop when the objective has not improved for this many epochs (0 disables).
  int patience{5};
};

struct FitReport {
  double objective{0.0};  ///< best objective reached (the returned parameters)
  int epochs{0};
  bool stopped_early{false};
};

namespace detail {

inline void check_weights_aligned(std::size_t n_traj, const std::vector<std::vector<double>>& weights) {
  if (weights.size() != n_traj) {
    throw ValidationError("fit: one weight sequence per trajectory is required");
  }
}

/// Generic full-batch Adam loop. `objective(params, grad)` returns the value
/// to maximize and writes its gradient.
template <class Objective>
std::pair<Vector, FitReport> maximize(const Objective& objective, Vector params, const FitConfig& cfg) {
  if (cfg.max_epochs < 1) {
    throw ValidationError("fit: max_epochs must be >= 1");
  }
  AdamState state(params.size(), cfg.adam);
  Vector grad(params.size());
  Vector best_params = params;
  double best = -std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  FitReport report;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double value = objective(params, grad);
    if (!std::isfinite(value) || !grad.allFinite()) {
      throw RuntimeError("fit: non-finite objective at epoch " + std::to_string(epoch));
    }
    report.epochs = epoch + 1;
    if (value > best) {
      // Improvements below round-off do not reset the patience counter.
      since_improvement = value > best + 1e-12 * std::max(1.0, std::abs(best)) ? 0 : since_improvement + 1;
      best = value;
      best_params = params;
    } else {
      ++since_improvement;
    }
    if (cfg.patience > 0 && since_improvement >= cfg.patience) {
      report.stopped_early = true;
      break;
    }
    std::tie(params, state) = adam_step(std::move(state), params, grad, /*ascent=*/true);
  }
  if (!report.stopped_early) {
    Vector tail_grad(params.size());
    const double value = objective(params, tail_grad);
    if (std::isfinite(value) && value > best) {
      best = value;
      best_params = params;
    }
  }
  report.objective = best;
  return {best_params, report};
}

}  // namespace detail

/// p̂(effect | s, a) = softmax(W[a]) over {up, right, down, left, stay},
/// independent of the state.
class ActionEffectModel {
 public:
  ActionEffectModel() : weights_{Matrix::Zero(kGridActions, kNumEffects)} {}
  explicit ActionEffectModel(Matrix weights) : weights_{std::move(weights)} {
    if (weights_.rows() != kGridActions || weights_.cols() != kNumEffects || !weights_.allFinite()) {
      throw ValidationError("ActionEffectModel: weights must be a finite 4 x 5 table");
    }
  }

  [[nodiscard]] const Matrix& weights() const { return weights_; }

  [[nodiscard]] Vector params() const {
    Vector theta(weights_.size());
    for (int a = 0; a < kGridActions; ++a) {
      theta.segment(a * kNumEffects, kNumEffects) = weights_.row(a).transpose();
    }
    return theta;
  }

  static ActionEffectModel from_params(const Vector& theta) {
    if (theta.size() != kGridActions * kNumEffects) {
      throw ValidationError("ActionEffectModel: expected 20 parameters");
    }
    Matrix w(kGridActions, kNumEffects);
    for (int a = 0; a < kGridActions; ++a) {
      w.row(a) = theta.segment(a * kNumEffects, kNumEffects).transpose();
    }
    return ActionEffectModel{w};
  }

  /// actions x effects table of probabilities.
  [[nodiscard]] Matrix effect_probabilities() const {
    Matrix p(kGridActions, kNumEffects);
    for (int a = 0; a < kGridActions; ++a) {
      const Vector row = (weights_.row(a).array() - weights_.row(a).maxCoeff()).exp();
      p.row(a) = row.transpose() / row.sum();
    }
    return p;
  }

 private:
  Matrix weights_;
};

/// Weighted log-likelihood of observed next cells under an action-effect
/// model. Transitions are grouped by (action, set of consistent effects), so
/// evaluation cost does not grow with the dataset.
class ActionEffectObjective {
 public:
  template <class A>
  ActionEffectObjective(const TwoAreasGridworld& env, const Dataset<int, A>& data,
                        const std::vector<std::vector<double>>& weights)
      : n_trajectories_{static_cast<double>(data.size())} {
    detail::check_weights_aligned(data.size(), weights);
    std::map<std::pair<int, unsigned>, double> grouped;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& traj = data.trajectories[i];
      if (weights[i].size() != traj.size()) {
        throw ValidationError("fit: weights misaligned with trajectory " + std::to_string(i));
      }
      for (std::size_t t = 0; t < traj.size(); ++t) {
        const auto& step = traj.steps[t];
        const double w = weights[i][t];
        if (w < 0.0 || !std::isfinite(w)) {
          throw ValidationError("fit: weights must be finite and nonnegative");
        }
        const auto mask = env.consistent_effects(step.state, step.next_state);
        unsigned bits = 0;
        for (int e = 0; e < kNumEffects; ++e) {
          bits |= mask[static_cast<std::size_t>(e)] ? (1U << static_cast<unsigned>(e)) : 0U;
        }
        if (bits == 0U) {
          throw ValidationError("fit: transition " + std::to_string(step.state) + " -> " +
                                std::to_string(step.next_state) + " is not a single grid move");
        }
        grouped[{static_cast<int>(step.action), bits}] += w;
        total += w;
      }
    }
    if (!(total > 0.0)) {
      throw ZeroWeightsError("fit: all transition weights are zero");
    }
    for (const auto& [key, w] : grouped) {
      if (w > 0.0) {
        groups_.push_back({key.first, key.second, w});
      }
    }
  }

  /// Objective value; writes d/dθ into `grad` (θ = flattened W).
  double operator()(const Vector& theta, Vector& grad) const {
    const Matrix probs = ActionEffectModel::from_params(theta).effect_probabilities();
    grad.setZero(theta.size());
    double value = 0.0;
    for (const auto& g : groups_) {
      double mass = 0.0;
      for (int e = 0; e < kNumEffects; ++e) {
        if (g.mask & (1U << static_cast<unsigned>(e))) {
          mass += probs(g.action, e);
        }
      }
      value += g.weight * std::log(mass);
      // d log(Σ_{e∈mask} p_e) / dW[a,j] = post_j - p_j, post = p restricted to mask, renormalized.
      for (int e = 0; e < kNumEffects; ++e) {
        const double post = (g.mask & (1U << static_cast<unsigned>(e))) ? probs(g.action, e) / mass : 0.0;
        grad(g.action * kNumEffects + e) += g.weight * (post - probs(g.action, e));
      }
    }
    grad /= n_trajectories_;
    return value / n_trajectories_;
  }

 private:
  struct Group {
    int action;
    unsigned mask;
    double weight;
  };
  double n_trajectories_;
  std::vector<Group> groups_;
};

/// Fits an action-effect model by weighted maximum likelihood.
template <class A>
std::pair<ActionEffectModel, FitReport> fit_weighted(const TwoAreasGridworld& env, const Dataset<int, A>& data,
                                                     const std::vector<std::vector<double>>& weights,
                                                     const FitConfig& cfg, const ActionEffectModel& init = {}) {
  const ActionEffectObjective objective(env, data, weights);
  auto [theta, report] = detail::maximize(objective, init.params(), cfg);
  return {ActionEffectModel::from_params(theta), report};
}

/// Full tabular kernel p̂(s'|s,a) of an action-effect model on the gridworld.
inline Matrix export_tabular_kernel(const ActionEffectModel& model, const TwoAreasGridworld& env) {
  return env.kernel_from_effects(model.effect_probabilities());
}

/// Next state s' = s - max(0, ε), ε ~ N(w_μ·φ, exp(w_σ·φ)²), φ = (s, a, 1).
class RectifiedLinearGaussianModel {
 public:
  static constexpr Eigen::Index kFeatures = 3;

  RectifiedLinearGaussianModel() : mean_weights_{Vector::Zero(kFeatures)}, log_std_weights_{Vector::Zero(kFeatures)} {}
  RectifiedLinearGaussianModel(Vector mean_weights, Vector log_std_weights)
      : mean_weights_{std::move(mean_weights)}, log_std_weights_{std::move(log_std_weights)} {
    if (mean_weights_.size() != kFeatures || log_std_weights_.size() != kFeatures || !mean_weights_.allFinite() ||
        !log_std_weights_.allFinite()) {
      throw ValidationError("RectifiedLinearGaussianModel: expected 3 finite mean and 3 finite log-std weights");
    }
  }

  static Vector features(double s, double a) { return Vector{{s, a, 1.0}}; }

  [[nodiscard]] const Vector& mean_weights() const { return mean_weights_; }
  [[nodiscard]] const Vector& log_std_weights() const { return log_std_weights_; }
  [[nodiscard]] double mean(double s, double a) const { return mean_weights_.dot(features(s, a)); }
  [[nodiscard]] double stddev(double s, double a) const { return std::exp(log_std_weights_.dot(features(s, a))); }

  [[nodiscard]] double sample_next(double s, double a, Rng& rng) const {
    const double eps = mean(s, a) + stddev(s, a) * standard_normal(rng);
    return s - std::max(0.0, eps);
  }

  /// Log-density of `next`; a point mass Φ(-μ/σ) sits at `next == s`.
  [[nodiscard]] double log_prob(double s, double a, double next) const {
    const double mu = mean(s, a);
    const double sigma = stddev(s, a);
    const double delta = s - next;
    if (delta < 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    if (delta == 0.0) {
      return std::log(0.5 * std::erfc(mu / (sigma * std::sqrt(2.0))));
    }
    const double z = (delta - mu) / sigma;
    return -0.5 * std::log(2.0 * M_PI) - std::log(sigma) - 0.5 * z * z;
  }

 private:
  Vector mean_weights_;
  Vector log_std_weights_;
};

/// Weighted squared error of the predicted displacement (s - s'), negated so
/// the generic maximizer applies. Fits the mean weights only.
class DisplacementObjective {
 public:
  template <class S, class A>
  DisplacementObjective(const Dataset<S, A>& data, const std::vector<std::vector<double>>& weights)
      : n_trajectories_{static_cast<double>(data.size())} {
    detail::check_weights_aligned(data.size(), weights);
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& traj = data.trajectories[i];
      if (weights[i].size() != traj.size()) {
        throw ValidationError("fit: weights misaligned with trajectory " + std::to_string(i));
      }
      for (std::size_t t = 0; t < traj.size(); ++t) {
        const double w = weights[i][t];
        if (w < 0.0 || !std::isfinite(w)) {
          throw ValidationError("fit: weights must be finite and nonnegative");
        }
        if (w == 0.0) {
          continue;
        }
        const auto& step = traj.steps[t];
        rows_.push_back({RectifiedLinearGaussianModel::features(step.state, step.action),
                         static_cast<double>(step.state) - static_cast<double>(step.next_state), w});
        total += w;
      }
    }
    if (!(total > 0.0)) {
      throw ZeroWeightsError("fit: all transition weights are zero");
    }
    total_weight_ = total;
  }

  double operator()(const Vector& w_mu, Vector& grad) const {
    grad.setZero(w_mu.size());
    double value = 0.0;
    for (const auto& r : rows_) {
      const double resid = r.target - w_mu.dot(r.phi);
      value -= r.weight * resid * resid;
      grad += (2.0 * r.weight * resid) * r.phi;
    }
    grad /= n_trajectories_;
    return value / n_trajectories_;
  }

  /// sqrt(Σ ω resid² / Σ ω) at the given mean weights.
  [[nodiscard]] double residual_std(const Vector& w_mu) const {
    double acc = 0.0;
    for (const auto& r : rows_) {
      const double resid = r.target - w_mu.dot(r.phi);
      acc += r.weight * resid * resid;
    }
    return std::sqrt(acc / total_weight_);
  }

 private:
  struct Row {
    Vector phi;
    double target;
    double weight;
  };
  double n_trajectories_;
  double total_weight_{0.0};
  std::vector<Row> rows_;
};

/// Weighted-MSE fit of the displacement mean, then a constant standard
/// deviation set to the weighted residual spread.
template <class S, class A>
std::pair<RectifiedLinearGaussianModel, FitReport> fit_weighted(const Dataset<S, A>& data,
                                                               const std::vector<std::vector<double>>& weights,
                                                               const FitConfig& cfg,
                                                               const RectifiedLinearGaussianModel& init = {}) {
  const DisplacementObjective objective(data, weights);
  auto [w_mu, report] = detail::maximize(objective, init.mean_weights(), cfg);
  const double sigma = std::max(objective.residual_std(w_mu), 1e-6);
  return {RectifiedLinearGaussianModel{w_mu, Vector{{0.0, 0.0, std::log(sigma)}}}, report};
}

/// Fraction of transitions whose observed next state is the argmax of
/// p̂(·|s,a); ties go to the lowest state index.
template <class A>
double model_accuracy(const Matrix& kernel, int n_actions, const Dataset<int, A>& data) {
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const auto& traj : data.trajectories) {
    for (const auto& step : traj.steps) {
      const auto row = kernel.row(step.state * n_actions + static_cast<int>(step.action));
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < row.size(); ++j) {
        if (row(j) > row(best)) {
          best = j;
        }
      }
      hits += best == step.next_state ? 1U : 0U;
      ++total;
    }
  }
  if (total == 0) {
    throw ValidationError("model_accuracy: empty dataset");
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

/// KL(p(·|s,a) ‖ p̂(·|s,a)) for every pair, as an S x A table. Entries are
/// +inf where p̂ misses support of p.
inline Matrix kl_to_true(const Matrix& p_true, const Matrix& p_hat, int n_actions) {
  if (p_true.rows() != p_hat.rows() || p_true.cols() != p_hat.cols() || n_actions <= 0 ||
      p_true.rows() % n_actions != 0) {
    throw ValidationError("kl_to_true: kernel shapes differ");
  }
  const auto n_states = static_cast<int>(p_true.rows() / n_actions);
  Matrix kl = Matrix::Zero(n_states, n_actions);
  for (Eigen::Index row = 0; row < p_true.rows(); ++row) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < p_true.cols(); ++j) {
      const double p = p_true(row, j);
      if (p <= 0.0) {
        continue;
      }
      const double q = p_hat(row, j);
      if (q <= 0.0) {
        acc = std::numeric_limits<double>::infinity();
        break;
      }
      acc += p * std::log(p / q);
    }
    kl(static_cast<int>(row) / n_actions, static_cast<int>(row) % n_actions) = std::max(0.0, acc);
  }
  return kl;
}

}  // namespace gamps

#endif  // GAMPS_MODELS_HPP
