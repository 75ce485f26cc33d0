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

#ifndef GAMPS_HARNESS_CONFIG_HPP
#define GAMPS_HARNESS_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamps/algorithms.hpp"
#include "gamps/envs/gridworld.hpp"
#include "gamps/envs/minigolf.hpp"
#include "gamps/error.hpp"
#include "gamps/io.hpp"
#include "gamps/optim.hpp"
#include "gamps/policies.hpp"

/**
 * \file
 * \brief Experiment configuration: a JSON document with fixed blocks.
 *
 * Every block is optional and falls back to per-environment defaults. Keys
 * that are not part of the schema are rejected.
 *
 * \code{.json}
 * {
 *   "environment": {"name": "gridworld", "horizon": 50, "gridworld": {"upper_rows": 2}},
 *   "policy": {"logit_scale": 0.3},
 *   "model": {"learning_rate": 0.01, "max_epochs": 300},
 *   "training": {"iterations": 15, "estimator": "gamps"},
 *   "data": {"n_train": 1000, "n_validation": 1000},
 *   "seed": 0, "repetitions": 10, "output_dir": "out"
 * }
 * \endcode
 */

namespace gamps {

enum class EnvKind { kGridworld, kMinigolf };

struct EnvironmentBlock {
  EnvKind kind{EnvKind::kGridworld};
  GridworldConfig gridworld{};
  MinigolfConfig minigolf{};
  int horizon{50};  ///< episode cap for collection and evaluation
};

struct PolicyBlock {
  double logit_scale{0.3};  ///< gridworld: std of the random initial logits of the upper area
  int rbf_centers{6};       ///< minigolf
  double mean_init{1.0};
  double log_std_init{0.0};
};

struct DataBlock {
  int n_train{1000};
  int n_validation{1000};
};

struct BoundsBlock {
  int random_instances{50};
  int max_states{6};
  int max_actions{3};
  double perturbation{0.5};  ///< mixing weight of the random kernel in perturbed models
};

struct QStudyBlock {
  int n_train{50};
  std::vector<QNorm> norms{QNorm::kOne, QNorm::kTwo, QNorm::kInf};
};

struct ExperimentConfig {
  EnvironmentBlock environment;
  PolicyBlock policy;
  TrainConfig training;  ///< model settings live in training.fit and training.rollout
  DataBlock data;
  BoundsBlock bounds;
  QStudyBlock qstudy;
  std::string output_dir{"out"};
  std::uint64_t seed{0};
  int repetitions{1};
  bool model_block_given{false};

  void validate() const {
    training.validate();
    if (training.fit.max_epochs < 1 || training.fit.patience < 0) {
      throw ValidationError("model: max_epochs must be >= 1 and patience >= 0");
    }
    if (!(training.fit.adam.alpha > 0.0)) {
      throw ValidationError("model: learning_rate must be positive");
    }
    if (data.n_train < 1 || data.n_validation < 1) {
      throw ValidationError("data: n_train and n_validation must be >= 1");
    }
    if (environment.horizon < 1) {
      throw ValidationError("environment: horizon must be >= 1");
    }
    if (repetitions < 1) {
      throw ValidationError("repetitions must be >= 1");
    }
    if (policy.rbf_centers < 2) {
      throw ValidationError("policy: rbf_centers must be >= 2");
    }
    if (bounds.random_instances < 0 || bounds.max_states < 2 || bounds.max_actions < 2) {
      throw ValidationError("bounds: need random_instances >= 0, max_states >= 2, max_actions >= 2");
    }
    if (!(bounds.perturbation > 0.0 && bounds.perturbation <= 1.0)) {
      throw ValidationError("bounds: perturbation must lie in (0, 1]");
    }
    if (qstudy.n_train < 1 || qstudy.norms.empty()) {
      throw ValidationError("qstudy: n_train must be >= 1 and norms non-empty");
    }
    if (output_dir.empty()) {
      throw ValidationError("output_dir must not be empty");
    }
  }
};

inline std::string to_string(EnvKind k) { return k == EnvKind::kGridworld ? "gridworld" : "minigolf"; }

/// Defaults for one environment.
inline ExperimentConfig default_config(EnvKind kind) {
  ExperimentConfig c;
  c.environment.kind = kind;
  if (kind == EnvKind::kGridworld) {
    c.environment.horizon = 50;
    c.training.iterations = 15;
    c.training.schedule = StepSchedule::constant(0.2);
    c.training.policy_adam = adam_preset("gridworld-policy");
    c.training.fit.adam = adam_preset("gridworld-model");
    c.training.eval_episodes = 1000;
    c.data = {1000, 1000};
  } else {
    c.environment.horizon = c.environment.minigolf.horizon;
    c.training.iterations = 30;
    c.training.schedule = StepSchedule::constant(0.08);
    c.training.policy_adam = adam_preset("minigolf-policy");
    c.training.fit.adam = adam_preset("minigolf-model");
    c.training.rollout = {10, 20};
    c.training.eval_episodes = 200;
    c.data = {50, 50};
  }
  c.training.gamma = 0.99;
  return c;
}

namespace detail {

/// Reads known keys from a JSON object and rejects the rest.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where) : j_{j}, where_{std::move(where)} {
    if (!j_.is_object()) {
      throw ValidationError(where_ + ": expected an object");
    }
  }

  [[nodiscard]] bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  void get(const std::string& key, int& out) {
    if (has(key)) {
      const auto& v = j_.at(key);
      if (!v.is_number_integer()) {
        throw ValidationError(path(key) + ": expected an integer");
      }
      out = v.get<int>();
    }
  }

  void get(const std::string& key, std::uint64_t& out) {
    if (has(key)) {
      const auto& v = j_.at(key);
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw ValidationError(path(key) + ": expected a nonnegative integer");
      }
      out = v.get<std::uint64_t>();
    }
  }

  void get(const std::string& key, double& out) {
    if (has(key)) {
      const auto& v = j_.at(key);
      if (!v.is_number()) {
        throw ValidationError(path(key) + ": expected a number");
      }
      out = v.get<double>();
    }
  }

  void get(const std::string& key, bool& out) {
    if (has(key)) {
      const auto& v = j_.at(key);
      if (!v.is_boolean()) {
        throw ValidationError(path(key) + ": expected true or false");
      }
      out = v.get<bool>();
    }
  }

  void get(const std::string& key, std::string& out) {
    if (has(key)) {
      const auto& v = j_.at(key);
      if (!v.is_string()) {
        throw ValidationError(path(key) + ": expected a string");
      }
      out = v.get<std::string>();
    }
  }

  [[nodiscard]] const Json* child(const std::string& key) { return has(key) ? &j_.at(key) : nullptr; }

  [[nodiscard]] std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) {
        throw ValidationError("unknown configuration key '" + where_ + "." + key + "'");
      }
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

inline QNorm qnorm_from_json(const Json& v, const std::string& where) {
  if (v.is_string()) {
    return parse_qnorm(v.get<std::string>());
  }
  if (v.is_number_integer()) {
    return parse_qnorm(std::to_string(v.get<long long>()));
  }
  throw ValidationError(where + ": expected 1, 2 or \"inf\"");
}

inline void read_gridworld(const Json& j, GridworldConfig& g) {
  ObjectReader r(j, "environment.gridworld");
  r.get("width", g.width);
  r.get("height", g.height);
  r.get("upper_rows", g.upper_rows);
  r.get("upper_cols", g.upper_cols);
  r.get("success_prob", g.success_prob);
  r.get("wrap", g.wrap);
  r.get("step_reward", g.step_reward);
  r.finish();
}

inline void read_minigolf(const Json& j, MinigolfConfig& m) {
  ObjectReader r(j, "environment.minigolf");
  r.get("max_distance", m.max_distance);
  r.get("friction_near", m.friction_near);
  r.get("friction_far", m.friction_far);
  r.get("gravity", m.gravity);
  r.get("putter_length", m.putter_length);
  r.get("hole_diameter", m.hole_diameter);
  r.get("ball_radius", m.ball_radius);
  r.get("noise_std", m.noise_std);
  r.get("noise", m.noise);
  r.finish();
}

}  // namespace detail

/// Builds a configuration from a parsed JSON document.
inline ExperimentConfig parse_config(const Json& doc) {
  detail::ObjectReader root(doc, "config");
  EnvKind kind = EnvKind::kGridworld;
  const Json* env = root.child("environment");
  if (env != nullptr && env->is_object() && env->contains("name")) {
    const auto& name = env->at("name");
    if (!name.is_string() || (name != "gridworld" && name != "minigolf")) {
      throw ValidationError("environment.name: expected \"gridworld\" or \"minigolf\"");
    }
    kind = name == "gridworld" ? EnvKind::kGridworld : EnvKind::kMinigolf;
  }
  ExperimentConfig c = default_config(kind);

  if (env != nullptr) {
    detail::ObjectReader r(*env, "environment");
    std::string name;
    r.get("name", name);
    bool horizon_given = r.has("horizon");
    r.get("horizon", c.environment.horizon);
    if (const Json* g = r.child("gridworld")) {
      detail::read_gridworld(*g, c.environment.gridworld);
    }
    if (const Json* m = r.child("minigolf")) {
      detail::read_minigolf(*m, c.environment.minigolf);
    }
    r.get("gamma", c.training.gamma);
    r.finish();
    if (kind == EnvKind::kMinigolf) {
      if (!horizon_given) {
        c.environment.horizon = c.environment.minigolf.horizon;
      }
      c.environment.minigolf.horizon = c.environment.horizon;
    }
  }
  c.environment.gridworld.discount = c.training.gamma;
  c.environment.minigolf.discount = c.training.gamma;

  if (const Json* p = root.child("policy")) {
    detail::ObjectReader r(*p, "policy");
    r.get("logit_scale", c.policy.logit_scale);
    r.get("rbf_centers", c.policy.rbf_centers);
    r.get("mean_init", c.policy.mean_init);
    r.get("log_std_init", c.policy.log_std_init);
    r.finish();
  }
  if (const Json* m = root.child("model")) {
    c.model_block_given = true;
    detail::ObjectReader r(*m, "model");
    r.get("learning_rate", c.training.fit.adam.alpha);
    r.get("beta1", c.training.fit.adam.beta1);
    r.get("beta2", c.training.fit.adam.beta2);
    r.get("max_epochs", c.training.fit.max_epochs);
    r.get("patience", c.training.fit.patience);
    r.get("rollouts", c.training.rollout.rollouts);
    r.get("rollout_horizon", c.training.rollout.horizon);
    r.finish();
  }
  if (const Json* t = root.child("training")) {
    detail::ObjectReader r(*t, "training");
    r.get("iterations", c.training.iterations);
    r.get("grad_steps", c.training.grad_steps);
    if (const Json* s = r.child("step_sizes")) {
      if (s->is_number()) {
        c.training.schedule = StepSchedule::constant(s->get<double>());
      } else if (s->is_array() && !s->empty()) {
        c.training.schedule.alphas.clear();
        for (const auto& a : *s) {
          if (!a.is_number()) {
            throw ValidationError("training.step_sizes: expected numbers");
          }
          c.training.schedule.alphas.push_back(a.get<double>());
        }
      } else {
        throw ValidationError("training.step_sizes: expected a number or a non-empty array");
      }
    }
    r.get("beta1", c.training.policy_adam.beta1);
    r.get("beta2", c.training.policy_adam.beta2);
    if (const Json* q = r.child("q")) {
      c.training.q = detail::qnorm_from_json(*q, "training.q");
    }
    r.get("ess_stop_fraction", c.training.ess_stop_fraction);
    std::string estimator = to_string(c.training.estimator);
    r.get("estimator", estimator);
    c.training.estimator = parse_estimator(estimator);
    r.get("eval_episodes", c.training.eval_episodes);
    r.finish();
  }
  if (const Json* d = root.child("data")) {
    detail::ObjectReader r(*d, "data");
    r.get("n_train", c.data.n_train);
    r.get("n_validation", c.data.n_validation);
    r.finish();
  }
  if (const Json* b = root.child("bounds")) {
    detail::ObjectReader r(*b, "bounds");
    r.get("random_instances", c.bounds.random_instances);
    r.get("max_states", c.bounds.max_states);
    r.get("max_actions", c.bounds.max_actions);
    r.get("perturbation", c.bounds.perturbation);
    r.finish();
  }
  if (const Json* q = root.child("qstudy")) {
    detail::ObjectReader r(*q, "qstudy");
    r.get("n_train", c.qstudy.n_train);
    if (const Json* norms = r.child("norms")) {
      if (!norms->is_array()) {
        throw ValidationError("qstudy.norms: expected an array");
      }
      c.qstudy.norms.clear();
      for (const auto& v : *norms) {
        c.qstudy.norms.push_back(detail::qnorm_from_json(v, "qstudy.norms"));
      }
    }
    r.finish();
  }
  root.get("output_dir", c.output_dir);
  root.get("seed", c.seed);
  root.get("repetitions", c.repetitions);
  root.finish();
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot read config file '" + path + "'");
  }
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

/// Fully resolved configuration (all defaults filled in), used for hashing.
inline Json to_json(const ExperimentConfig& c) {
  const auto& g = c.environment.gridworld;
  const auto& m = c.environment.minigolf;
  const auto& t = c.training;
  Json norms = Json::array();
  for (const auto q : c.qstudy.norms) {
    norms.push_back(to_string(q));
  }
  return Json{
      {"environment",
       {{"name", to_string(c.environment.kind)},
        {"horizon", c.environment.horizon},
        {"gamma", t.gamma},
        {"gridworld",
         {{"width", g.width},
          {"height", g.height},
          {"upper_rows", g.upper_rows},
          {"upper_cols", g.upper_cols},
          {"success_prob", g.success_prob},
          {"wrap", g.wrap},
          {"step_reward", g.step_reward}}},
        {"minigolf",
         {{"max_distance", m.max_distance},
          {"friction_near", m.friction_near},
          {"friction_far", m.friction_far},
          {"gravity", m.gravity},
          {"putter_length", m.putter_length},
          {"hole_diameter", m.hole_diameter},
          {"ball_radius", m.ball_radius},
          {"noise_std", m.noise_std},
          {"noise", m.noise}}}}},
      {"policy",
       {{"logit_scale", c.policy.logit_scale},
        {"rbf_centers", c.policy.rbf_centers},
        {"mean_init", c.policy.mean_init},
        {"log_std_init", c.policy.log_std_init}}},
      {"model",
       {{"learning_rate", t.fit.adam.alpha},
        {"beta1", t.fit.adam.beta1},
        {"beta2", t.fit.adam.beta2},
        {"max_epochs", t.fit.max_epochs},
        {"patience", t.fit.patience},
        {"rollouts", t.rollout.rollouts},
        {"rollout_horizon", t.rollout.horizon}}},
      {"training",
       {{"iterations", t.iterations},
        {"grad_steps", t.grad_steps},
        {"step_sizes", t.schedule.alphas},
        {"beta1", t.policy_adam.beta1},
        {"beta2", t.policy_adam.beta2},
        {"q", to_string(t.q)},
        {"ess_stop_fraction", t.ess_stop_fraction},
        {"estimator", to_string(t.estimator)},
        {"eval_episodes", t.eval_episodes}}},
      {"data", {{"n_train", c.data.n_train}, {"n_validation", c.data.n_validation}}},
      {"bounds",
       {{"random_instances", c.bounds.random_instances},
        {"max_states", c.bounds.max_states},
        {"max_actions", c.bounds.max_actions},
        {"perturbation", c.bounds.perturbation}}},
      {"qstudy", {{"n_train", c.qstudy.n_train}, {"norms", norms}}},
      {"output_dir", c.output_dir},
      {"seed", c.seed},
      {"repetitions", c.repetitions}};
}

/// Hash of the resolved configuration. The output directory is left out so
/// the same experiment written to two places produces identical files.
inline std::string config_hash(const ExperimentConfig& c) {
  Json j = to_json(c);
  j.erase("output_dir");
  return hash_json(j);
}

}  // namespace gamps

#endif  // GAMPS_HARNESS_CONFIG_HPP
