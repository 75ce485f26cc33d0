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

#ifndef GAMPS_ALGORITHMS_HPP
#define GAMPS_ALGORITHMS_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gamps/envs/gridworld.hpp"
#include "gamps/envs/minigolf.hpp"
#include "gamps/error.hpp"
#include "gamps/gradient.hpp"
#include "gamps/mdp.hpp"
#include "gamps/models.hpp"
#include "gamps/optim.hpp"
#include "gamps/policies.hpp"
#include "gamps/value.hpp"
#include "gamps/weighting.hpp"

/**
 * \file
 * \brief Batch training loops: gradient-aware model-based policy search and
 * the maximum-likelihood, REINFORCE and PGT baselines.
 */

namespace gamps {

enum class Estimator { kGamps, kMl, kReinforce, kPgt };

inline Estimator parse_estimator(std::string_view text) {
  if (text == "gamps") {
    return Estimator::kGamps;
  }
  if (text == "ml") {
    return Estimator::kMl;
  }
  if (text == "reinforce") {
    return Estimator::kReinforce;
  }
  if (text == "pgt") {
    return Estimator::kPgt;
  }
  throw ValidationError("unknown estimator '" + std::string(text) + "' (expected gamps, ml, reinforce or pgt)");
}

inline std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::kGamps:
      return "gamps";
    case Estimator::kMl:
      return "ml";
    case Estimator::kReinforce:
      return "reinforce";
    case Estimator::kPgt:
      return "pgt";
  }
  return "?";
}

inline bool is_model_based(Estimator e) { return e == Estimator::kGamps || e == Estimator::kMl; }

struct TrainConfig {
  int iterations{15};
  int grad_steps{1};
  StepSchedule schedule{{0.2}};
  AdamConfig policy_adam{0.2, 0.9, 0.999, 1e-8};  ///< alpha is taken from `schedule`
  FitConfig fit{};
  RolloutQConfig rollout{};
  QNorm q{QNorm::kTwo};
  double gamma{0.99};
  /// Stop once the full-trajectory ESS drops below this fraction of N (0 disables).
  double ess_stop_fraction{0.1};
  Estimator estimator{Estimator::kGamps};
  int eval_episodes{100};
  std::uint64_t seed{0};
  bool timing{false};  ///< record wall-clock times (otherwise logged as 0)

  void validate() const {
    if (iterations < 1) {
      throw ValidationError("training: iterations must be >= 1");
    }
    if (grad_steps < 1) {
      throw ValidationError("training: grad_steps must be >= 1");
    }
    if (eval_episodes < 1) {
      throw ValidationError("training: eval_episodes must be >= 1");
    }
    if (!(ess_stop_fraction >= 0.0 && ess_stop_fraction <= 1.0)) {
      throw ValidationError("training: ess_stop_fraction must lie in [0, 1]");
    }
    check_discount(gamma);
    rollout.validate();
    for (const double a : schedule.alphas) {
      if (!(a > 0.0)) {
        throw ValidationError("training: step sizes must be positive");
      }
    }
    (void)schedule.at(0);
  }
};

struct IterationRecord {
  int iteration{0};
  Vector params;  ///< θ_{k+1}, after this iteration's update
  double mean_return{0.0};
  double std_return{0.0};
  double grad_norm{0.0};
  double ess{0.0};
  double fit_objective{0.0};  ///< NaN for model-free estimators
  int fit_epochs{0};
  double wall_time_ms{0.0};
};

struct RunLog {
  Estimator estimator{Estimator::kGamps};
  double initial_mean_return{0.0};
  double initial_std_return{0.0};
  std::vector<IterationRecord> records;
  bool ess_stopped{false};
  int ess_stop_iteration{-1};
  double ess_at_stop{0.0};
  std::string failure;  ///< non-empty when a model fit aborted the run

  [[nodiscard]] double best_mean_return() const {
    double best = initial_mean_return;
    for (const auto& r : records) {
      best = std::max(best, r.mean_return);
    }
    return best;
  }
  [[nodiscard]] double final_mean_return() const {
    return records.empty() ? initial_mean_return : records.back().mean_return;
  }
};

struct ReturnStats {
  double mean{0.0};
  double std{0.0};
};

/// Monte-Carlo mean and (sample) standard deviation of discounted returns in
/// the true environment.
template <Environment Env, class Policy>
ReturnStats evaluate_policy(const Env& env, const Policy& policy, int n_episodes, int horizon, double gamma,
                            Rng& rng) {
  if (n_episodes < 1) {
    throw ValidationError("evaluate_policy: n_episodes must be >= 1");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n_episodes; ++i) {
    const double ret = discounted_return(sample_trajectory(env, policy, horizon, rng), gamma);
    sum += ret;
    sum_sq += ret * ret;
  }
  const double n = static_cast<double>(n_episodes);
  ReturnStats out;
  out.mean = sum / n;
  out.std = n_episodes > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0))) : 0.0;
  return out;
}

/// Result of fitting a model for the current policy: its Q-function and fit diagnostics.
template <class State, class Action>
struct ModelQ {
  std::function<double(const State&, const Action&)> q;
  FitReport report;
};

/// Gridworld: action-effect model, exact Q on the exported kernel.
class GridworldProblem {
 public:
  using Env = TwoAreasGridworld;
  using Policy = TabularSoftmaxPolicy;
  using State = int;
  using Action = int;

  explicit GridworldProblem(TwoAreasGridworld env, int horizon = 50)
      : env_{std::move(env)}, mdp_{env_.true_kernel()}, horizon_{horizon} {}

  [[nodiscard]] const TwoAreasGridworld& env() const { return env_; }
  [[nodiscard]] const TabularMdp& true_mdp() const { return mdp_; }
  [[nodiscard]] int horizon() const { return horizon_; }

  [[nodiscard]] ModelQ<int, int> model_q(const Dataset<int, int>& data, const std::vector<std::vector<double>>& w,
                                         const Policy& pi, const TrainConfig& cfg, Rng& /*rng*/) const {
    auto [model, report] = fit_weighted(env_, data, w, cfg.fit);
    const Matrix q = exact_q(export_tabular_kernel(model, env_), pi.probabilities(), mdp_.reward, cfg.gamma);
    return {[q](const int& s, const int& a) { return q(s, a); }, report};
  }

 private:
  TwoAreasGridworld env_;
  TabularMdp mdp_;
  int horizon_;
};

/// Minigolf: rectified linear-Gaussian model, Monte-Carlo Q from model rollouts.
class MinigolfProblem {
 public:
  using Env = Minigolf;
  using Policy = RbfGaussianPolicy;
  using State = double;
  using Action = double;

  explicit MinigolfProblem(Minigolf env) : env_{std::move(env)} {}

  [[nodiscard]] const Minigolf& env() const { return env_; }
  [[nodiscard]] int horizon() const { return env_.config().horizon; }

  [[nodiscard]] ModelQ<double, double> model_q(const Dataset<double, double>& data,
                                               const std::vector<std::vector<double>>& w, const Policy& pi,
                                               const TrainConfig& cfg, Rng& rng) const {
    auto [model, report] = fit_weighted(data, w, cfg.fit);
    auto sim = [env = env_, model](double x, double a, Rng& r) { return env.outcome(x, model.sample_next(x, a, r)); };
    auto q = [sim, pi, rollout = cfg.rollout, gamma = cfg.gamma, stream = rng](const double& s,
                                                                               const double& a) mutable {
      return mc_q(sim, pi, s, a, rollout, gamma, stream);
    };
    return {std::move(q), report};
  }

 private:
  Minigolf env_;
};

/// Maps (dataset, current policy) to per-transition fit weights.
template <class Problem>
using WeightFn = std::function<std::vector<std::vector<double>>(
    const Dataset<typename Problem::State, typename Problem::Action>&, const typename Problem::Policy&)>;

namespace detail {

inline constexpr std::uint64_t kEvalStream = 1;
inline constexpr std::uint64_t kModelStream = 2;

inline std::uint64_t stream_id(std::uint64_t kind, int iteration) {
  return (kind << 32U) | static_cast<std::uint64_t>(iteration + 1);
}

inline bool has_positive_weight(const std::vector<std::vector<double>>& weights) {
  for (const auto& w : weights) {
    for (const double x : w) {
      if (x > 0.0) {
        return true;
      }
    }
  }
  return false;
}

template <class Problem>
RunLog train(const Problem& problem, const Dataset<typename Problem::State, typename Problem::Action>& data,
             const typename Problem::Policy& theta0, const TrainConfig& cfg, Estimator kind,
             const WeightFn<Problem>& weight_fn) {
  using Clock = std::chrono::steady_clock;
  cfg.validate();
  if (data.empty()) {
    throw ValidationError("training: empty dataset");
  }
  const int horizon = problem.horizon();
  RunLog log;
  log.estimator = kind;
  {
    auto rng = derive_rng(cfg.seed, stream_id(kEvalStream, -1));
    const auto init = evaluate_policy(problem.env(), theta0, cfg.eval_episodes, horizon, cfg.gamma, rng);
    log.initial_mean_return = init.mean;
    log.initial_std_return = init.std;
  }
  auto policy = theta0;
  AdamState adam(policy.num_params(), cfg.policy_adam);
  const double n = static_cast<double>(data.size());
  for (int k = 0; k < cfg.iterations; ++k) {
    const auto start = Clock::now();
    IterationRecord rec;
    rec.iteration = k;
    rec.ess = detail::ess_or_zero(trajectory_importance_weights(data, policy));
    if (cfg.ess_stop_fraction > 0.0 && rec.ess < cfg.ess_stop_fraction * n) {
      log.ess_stopped = true;
      log.ess_stop_iteration = k;
      log.ess_at_stop = rec.ess;
      break;
    }
    std::function<Vector(const typename Problem::Policy&)> gradient;
    ModelQ<typename Problem::State, typename Problem::Action> mq;
    if (is_model_based(kind)) {
      const auto weights = weight_fn(data, policy);
      if (!has_positive_weight(weights)) {
        // Every observed score is zero, so the MVG estimate is zero for any Q.
        rec.fit_objective = std::nan("");
        gradient = [&](const auto& pi) { return Vector(Vector::Zero(pi.num_params())); };
      } else {
        auto model_rng = derive_rng(cfg.seed, stream_id(kModelStream, k));
        try {
          mq = problem.model_q(data, weights, policy, cfg, model_rng);
        } catch (const RuntimeError& e) {
          log.failure = std::string("model fit failed at iteration ") + std::to_string(k) + ": " + e.what();
          break;
        }
        rec.fit_objective = mq.report.objective;
        rec.fit_epochs = mq.report.epochs;
        gradient = [&](const auto& pi) { return mvg_gradient(data, pi, mq.q, cfg.gamma).value; };
      }
    } else {
      rec.fit_objective = std::nan("");
      if (kind == Estimator::kReinforce) {
        gradient = [&](const auto& pi) { return reinforce_gradient(data, pi, cfg.gamma).value; };
      } else {
        gradient = [&](const auto& pi) { return pgt_gradient(data, pi, cfg.gamma).value; };
      }
    }
    adam.config.alpha = cfg.schedule.at(static_cast<std::size_t>(k));
    Vector theta = policy.params();
    for (int step = 0; step < cfg.grad_steps; ++step) {
      const Vector g = gradient(policy);
      if (step == 0) {
        rec.grad_norm = g.norm();
      }
      std::tie(theta, adam) = adam_step(std::move(adam), theta, g, /*ascent=*/true);
      policy = policy.with_params(theta);
    }
    rec.params = theta;
    auto eval_rng = derive_rng(cfg.seed, stream_id(kEvalStream, k));
    const auto ret = evaluate_policy(problem.env(), policy, cfg.eval_episodes, horizon, cfg.gamma, eval_rng);
    rec.mean_return = ret.mean;
    rec.std_return = ret.std;
    if (cfg.timing) {
      rec.wall_time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    log.records.push_back(std::move(rec));
  }
  return log;
}

}  // namespace detail

/// Gradient-aware weights at the current policy.
template <class Problem>
WeightFn<Problem> gamps_weights(double gamma, QNorm q) {
  return [gamma, q](const auto& data, const auto& pi) { return gamps_dataset_weights(data, pi, gamma, q); };
}

template <class Problem>
WeightFn<Problem> unit_weights() {
  return [](const auto& data, const auto&) { return uniform_dataset_weights(data); };
}

/// Fit a model with gradient-aware weights, compute its Q, take MVG ascent
/// steps; repeat. `weights` replaces the weighting rule when given.
template <class Problem>
RunLog run_gamps(const Problem& problem, const Dataset<typename Problem::State, typename Problem::Action>& data,
                 const typename Problem::Policy& theta0, const TrainConfig& cfg,
                 WeightFn<Problem> weights = nullptr) {
  if (!weights) {
    weights = gamps_weights<Problem>(cfg.gamma, cfg.q);
  }
  return detail::train(problem, data, theta0, cfg, Estimator::kGamps, weights);
}

template <class Problem>
RunLog run_baseline(Estimator kind, const Problem& problem,
                    const Dataset<typename Problem::State, typename Problem::Action>& data,
                    const typename Problem::Policy& theta0, const TrainConfig& cfg) {
  if (kind == Estimator::kGamps) {
    throw ValidationError("run_baseline: estimator must be ml, reinforce or pgt");
  }
  return detail::train(problem, data, theta0, cfg, kind, unit_weights<Problem>());
}

/// Dispatches on `cfg.estimator`.
template <class Problem>
RunLog run_estimator(const Problem& problem, const Dataset<typename Problem::State, typename Problem::Action>& data,
                     const typename Problem::Policy& theta0, const TrainConfig& cfg) {
  return cfg.estimator == Estimator::kGamps ? run_gamps(problem, data, theta0, cfg)
                                            : run_baseline(cfg.estimator, problem, data, theta0, cfg);
}

}  // namespace gamps

#endif  // GAMPS_ALGORITHMS_HPP
