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

#ifndef GAMPS_HARNESS_COMMANDS_HPP
#define GAMPS_HARNESS_COMMANDS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gamps/algorithms.hpp"
#include "gamps/gradient.hpp"
#include "gamps/harness/config.hpp"
#include "gamps/harness/instances.hpp"
#include "gamps/io.hpp"
#include "gamps/models.hpp"
#include "gamps/value.hpp"
#include "gamps/weighting.hpp"

/**
 * \file
 * \brief The experiment commands behind the CLI. Each command writes its
 * outputs under the configured output directory and also returns them.
 */

namespace gamps {

namespace streams {
inline constexpr std::uint64_t kPolicy = 11;
inline constexpr std::uint64_t kTrainData = 12;
inline constexpr std::uint64_t kValidationData = 13;
inline constexpr std::uint64_t kTraining = 14;
inline constexpr std::uint64_t kBounds = 15;
inline constexpr std::uint64_t kEvaluation = 16;
}  // namespace streams

/// Master seed of repetition `r`.
inline std::uint64_t rep_seed(const ExperimentConfig& c, int r) { return c.seed + static_cast<std::uint64_t>(r); }

/// Where commands write and what they stamp on their files.
class OutputSink {
 public:
  explicit OutputSink(const ExperimentConfig& c) : dir_{c.output_dir}, hash_{config_hash(c)} {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
      throw RuntimeError("cannot create output directory '" + dir_.string() + "'");
    }
  }

  [[nodiscard]] std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  [[nodiscard]] const std::string& hash() const { return hash_; }

  [[nodiscard]] std::ofstream open(const std::string& name) const {
    std::ofstream out(path(name), std::ios::binary);
    if (!out) {
      throw RuntimeError("cannot write '" + path(name).string() + "'");
    }
    return out;
  }

  [[nodiscard]] std::vector<std::string> stamp(const std::string& what, std::uint64_t seed) const {
    return {"gamps " + what, "config_hash=" + hash_ + " seed=" + std::to_string(seed)};
  }

 private:
  std::filesystem::path dir_;
  std::string hash_;
};

inline std::string cell(double x) { return format_double(x); }

struct MeanCi {
  double mean{0.0};
  std::optional<double> ci95;  ///< half-width; absent for a single run
};

/// Mean and Student-t 95% confidence half-width.
inline MeanCi mean_ci(const std::vector<double>& xs) {
  static constexpr double kT975[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                     2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                     2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  MeanCi out;
  if (xs.empty()) {
    return out;
  }
  const double n = static_cast<double>(xs.size());
  for (const double x : xs) {
    out.mean += x / n;
  }
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) {
      ss += (x - out.mean) * (x - out.mean);
    }
    const std::size_t df = xs.size() - 1;
    const double t = df <= 30 ? kT975[df - 1] : 1.96;
    out.ci95 = t * std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

inline double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) {
    return 0.0;
  }
  double mean = 0.0;
  for (const double x : xs) {
    mean += x;
  }
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (const double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline GridworldProblem make_gridworld_problem(const ExperimentConfig& c) {
  return GridworldProblem{TwoAreasGridworld{c.environment.gridworld}, c.environment.horizon};
}

inline MinigolfProblem make_minigolf_problem(const ExperimentConfig& c) {
  return MinigolfProblem{Minigolf{c.environment.minigolf}};
}

inline TabularSoftmaxPolicy behavior_policy(const GridworldProblem& p, const ExperimentConfig& c, int r) {
  auto rng = derive_rng(rep_seed(c, r), streams::kPolicy);
  return p.env().initial_policy(rng, c.policy.logit_scale);
}

inline RbfGaussianPolicy behavior_policy(const MinigolfProblem& p, const ExperimentConfig& c, int /*r*/) {
  return RbfGaussianPolicy::equally_spaced(0.0, p.env().config().max_distance, c.policy.rbf_centers,
                                           c.policy.mean_init, c.policy.log_std_init);
}

/// Calls `f(problem)` with the problem matching the configured environment.
template <class F>
decltype(auto) with_problem(const ExperimentConfig& c, F&& f) {
  if (c.environment.kind == EnvKind::kGridworld) {
    return f(make_gridworld_problem(c));
  }
  return f(make_minigolf_problem(c));
}

inline std::string env_hash(const ExperimentConfig& c) {
  const Json j = to_json(c).at("environment");
  return hash_json(j);
}

template <class Problem>
Json dataset_manifest(const ExperimentConfig& c, const typename Problem::Policy& pi, int r) {
  return Json{{"environment", to_string(c.environment.kind)},
              {"env_hash", env_hash(c)},
              {"policy_hash", hash_vector(pi.params())},
              {"seed", rep_seed(c, r)},
              {"repetition", r},
              {"horizon", c.environment.horizon}};
}

template <class Problem>
Dataset<typename Problem::State, typename Problem::Action> collect_for(const Problem& p, const ExperimentConfig& c,
                                                                        const typename Problem::Policy& pi, int r,
                                                                        int n, std::uint64_t stream) {
  return collect_dataset(p.env(), pi, n, c.environment.horizon, derive_seed(rep_seed(c, r), stream),
                         hash_vector(pi.params()));
}

inline std::string dataset_file_name(int r) { return "dataset_rep" + std::to_string(r) + ".ndjson"; }

/// Writes one training dataset per repetition. Returns the file paths.
inline std::vector<std::filesystem::path> cmd_collect(const ExperimentConfig& c) {
  c.validate();
  const OutputSink sink(c);
  std::vector<std::filesystem::path> files;
  with_problem(c, [&](const auto& problem) {
    using Problem = std::decay_t<decltype(problem)>;
    for (int r = 0; r < c.repetitions; ++r) {
      const auto pi = behavior_policy(problem, c, r);
      const auto data = collect_for(problem, c, pi, r, c.data.n_train, streams::kTrainData);
      Json header = dataset_manifest<Problem>(c, pi, r);
      header["config_hash"] = sink.hash();
      auto out = sink.open(dataset_file_name(r));
      write_dataset(out, data, header);
      files.push_back(sink.path(dataset_file_name(r)));
    }
  });
  return files;
}

/// Loads repetition `r`'s dataset from `dir` and checks it was produced by
/// this configuration's environment and behavior policy.
template <class Problem>
Dataset<typename Problem::State, typename Problem::Action> load_matching_dataset(const std::filesystem::path& dir,
                                                                                 const ExperimentConfig& c,
                                                                                 const typename Problem::Policy& pi,
                                                                                 int r) {
  const auto path = dir / dataset_file_name(r);
  if (!std::filesystem::exists(path)) {
    throw ValidationError("dataset '" + path.string() + "' not found");
  }
  auto loaded = load_dataset<typename Problem::State, typename Problem::Action>(path.string());
  const Json expected = dataset_manifest<Problem>(c, pi, r);
  for (const char* key : {"environment", "env_hash", "policy_hash", "seed"}) {
    if (!loaded.header.contains(key) || loaded.header.at(key) != expected.at(key)) {
      throw ValidationError("dataset '" + path.string() + "' does not match the configuration (" + key + ")");
    }
  }
  return std::move(loaded.data);
}

inline std::vector<std::string> runlog_columns() {
  return {"iteration", "mean_return", "std_return", "grad_norm", "ess", "fit_objective", "wall_time_ms"};
}

inline void write_runlog(std::ostream& out, const RunLog& log, const std::vector<std::string>& stamp) {
  CsvWriter csv(out, stamp, runlog_columns());
  for (const auto& rec : log.records) {
    csv.write_row({std::to_string(rec.iteration + 1), cell(rec.mean_return), cell(rec.std_return),
                   cell(rec.grad_norm), cell(rec.ess), cell(rec.fit_objective), cell(rec.wall_time_ms)});
  }
  csv.comment("initial_mean_return=" + cell(log.initial_mean_return) +
              " initial_std_return=" + cell(log.initial_std_return));
  if (log.ess_stopped) {
    csv.comment("stopped: ess " + cell(log.ess_at_stop) + " below threshold before iteration " +
                std::to_string(log.ess_stop_iteration + 1));
  }
  if (!log.failure.empty()) {
    csv.comment("failed: " + log.failure);
  }
}

/// Per-iteration mean across repetitions; `std_return` is the spread of the
/// repetition means. Repetitions that stopped early do not contribute to
/// later iterations.
inline void write_aggregate(std::ostream& out, const std::vector<RunLog>& logs, int iterations,
                            const std::vector<std::string>& stamp) {
  auto columns = runlog_columns();
  columns.push_back("n_reps");
  CsvWriter csv(out, stamp, columns);
  for (int k = 0; k < iterations; ++k) {
    std::vector<double> ret, grad, ess, fit, wall;
    for (const auto& log : logs) {
      if (static_cast<std::size_t>(k) < log.records.size()) {
        const auto& rec = log.records[static_cast<std::size_t>(k)];
        ret.push_back(rec.mean_return);
        grad.push_back(rec.grad_norm);
        ess.push_back(rec.ess);
        fit.push_back(rec.fit_objective);
        wall.push_back(rec.wall_time_ms);
      }
    }
    if (ret.empty()) {
      csv.write_row({std::to_string(k + 1), "", "", "", "", "", "", "0"});
      continue;
    }
    csv.write_row({std::to_string(k + 1), cell(mean_ci(ret).mean), cell(sample_std(ret)), cell(mean_ci(grad).mean),
                   cell(mean_ci(ess).mean), cell(mean_ci(fit).mean), cell(mean_ci(wall).mean),
                   std::to_string(ret.size())});
  }
}

inline void write_policy(std::ostream& out, const Vector& params) {
  Json p = Json::array();
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    p.push_back(params(i));
  }
  out << Json{{"params", p}}.dump() << '\n';
}

inline Vector read_policy_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot read policy file '" + path + "'");
  }
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("policy file '" + path + "' is not JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("params") || !j["params"].is_array()) {
    throw ValidationError("policy file '" + path + "' has no params array");
  }
  Vector v(static_cast<Eigen::Index>(j["params"].size()));
  for (std::size_t i = 0; i < j["params"].size(); ++i) {
    if (!j["params"][i].is_number()) {
      throw ValidationError("policy file '" + path + "': params must be numbers");
    }
    v(static_cast<Eigen::Index>(i)) = j["params"][i].get<double>();
  }
  return v;
}

inline TrainConfig training_for_rep(const ExperimentConfig& c, int r) {
  TrainConfig t = c.training;
  t.seed = derive_seed(rep_seed(c, r), streams::kTraining);
  return t;
}

struct TrainOptions {
  std::optional<std::filesystem::path> data_dir;  ///< use datasets written by collect
  std::ostream* warnings{&std::cerr};
};

/// Trains the configured estimator once per repetition.
inline std::vector<RunLog> cmd_train(const ExperimentConfig& c, const TrainOptions& opts = {}) {
  c.validate();
  if (!is_model_based(c.training.estimator) && c.model_block_given && opts.warnings != nullptr) {
    *opts.warnings << "warning: estimator " << to_string(c.training.estimator)
                   << " is model-free; the model block is ignored\n";
  }
  const OutputSink sink(c);
  const std::string est = to_string(c.training.estimator);
  std::vector<RunLog> logs;
  with_problem(c, [&](const auto& problem) {
    using Problem = std::decay_t<decltype(problem)>;
    for (int r = 0; r < c.repetitions; ++r) {
      const auto pi = behavior_policy(problem, c, r);
      const auto data = opts.data_dir ? load_matching_dataset<Problem>(*opts.data_dir, c, pi, r)
                                      : collect_for(problem, c, pi, r, c.data.n_train, streams::kTrainData);
      auto log = run_estimator(problem, data, pi, training_for_rep(c, r));
      {
        auto out = sink.open("runlog_" + est + "_rep" + std::to_string(r) + ".csv");
        write_runlog(out, log, sink.stamp("train estimator=" + est + " repetition=" + std::to_string(r), rep_seed(c, r)));
      }
      {
        auto out = sink.open("policy_" + est + "_rep" + std::to_string(r) + ".json");
        write_policy(out, log.records.empty() ? pi.params() : log.records.back().params);
      }
      logs.push_back(std::move(log));
    }
  });
  auto out = sink.open("runlog_" + est + "_aggregate.csv");
  write_aggregate(out, logs, c.training.iterations, sink.stamp("train aggregate estimator=" + est, c.seed));
  return logs;
}

/// Evaluates the behavior policy, or the policy stored in `policy_file`, in
/// the true environment for every repetition.
inline std::vector<ReturnStats> cmd_evaluate(const ExperimentConfig& c,
                                             const std::optional<std::string>& policy_file = std::nullopt) {
  c.validate();
  const std::optional<Vector> params =
      policy_file ? std::optional<Vector>{read_policy_params(*policy_file)} : std::nullopt;
  const OutputSink sink(c);
  std::vector<ReturnStats> results;
  auto out = sink.open("evaluate.csv");
  CsvWriter csv(out, sink.stamp("evaluate", c.seed), {"repetition", "seed", "episodes", "mean_return", "std_return"});
  with_problem(c, [&](const auto& problem) {
    for (int r = 0; r < c.repetitions; ++r) {
      auto pi = behavior_policy(problem, c, r);
      if (params) {
        if (params->size() != pi.num_params()) {
          throw ValidationError("policy file has " + std::to_string(params->size()) + " parameters, expected " +
                                std::to_string(pi.num_params()));
        }
        pi = pi.with_params(*params);
      }
      auto rng = derive_rng(rep_seed(c, r), streams::kEvaluation);
      const auto stats = evaluate_policy(problem.env(), pi, c.training.eval_episodes, c.environment.horizon,
                                         c.training.gamma, rng);
      csv.write_row({std::to_string(r), std::to_string(rep_seed(c, r)), std::to_string(c.training.eval_episodes),
                     cell(stats.mean), cell(stats.std)});
      results.push_back(stats);
    }
  });
  return results;
}

inline void require_gridworld(const ExperimentConfig& c, const char* command) {
  if (c.environment.kind != EnvKind::kGridworld) {
    throw ValidationError(std::string(command) + " needs a tabular (gridworld) environment");
  }
}

struct EstimationMetrics {
  double accuracy{0.0};
  double q_mse{0.0};
  double cosine{0.0};         ///< against the exact gradient
  double cosine_sample{0.0};  ///< against the same-sample estimate with the true Q
  double fit_objective{0.0};
};

struct Table1Run {
  EstimationMetrics ml;
  EstimationMetrics gamps;
};

/// Model accuracy, Q error and gradient direction for ML and gradient-aware
/// models fitted on one training set, measured on a validation set.
inline Table1Run table1_run(const GridworldProblem& problem, const ExperimentConfig& c, int r) {
  const auto pi = behavior_policy(problem, c, r);
  const auto train = collect_for(problem, c, pi, r, c.data.n_train, streams::kTrainData);
  const auto val = collect_for(problem, c, pi, r, c.data.n_validation, streams::kValidationData);
  const TabularMdp& mdp = problem.true_mdp();
  const double gamma = c.training.gamma;
  const Matrix q_true = exact_q(mdp.kernel, pi.probabilities(), mdp.reward, gamma);
  TabularMdp mdp_g = mdp;
  mdp_g.discount = gamma;
  const Vector g_exact = exact_gradient_tabular(mdp_g, pi);
  const Vector g_sample = mvg_gradient(val, pi, [&](int s, int a) { return q_true(s, a); }, gamma).value;
  Table1Run run;
  for (const bool aware : {false, true}) {
    const auto w = aware ? gamps_dataset_weights(train, pi, gamma, c.training.q) : uniform_dataset_weights(train);
    const auto [model, report] = fit_weighted(problem.env(), train, w, c.training.fit);
    const Matrix kernel = export_tabular_kernel(model, problem.env());
    const Matrix q_hat = exact_q(kernel, pi.probabilities(), mdp.reward, gamma);
    const Vector g_hat = mvg_gradient(val, pi, [&](int s, int a) { return q_hat(s, a); }, gamma).value;
    EstimationMetrics& m = aware ? run.gamps : run.ml;
    m.accuracy = model_accuracy(kernel, mdp.n_actions, val);
    m.q_mse = q_mse(q_hat, q_true);
    m.cosine = cosine_similarity(g_exact, g_hat);
    m.cosine_sample = cosine_similarity(g_sample, g_hat);
    m.fit_objective = report.objective;
  }
  return run;
}

inline std::vector<Table1Run> cmd_table1(const ExperimentConfig& c) {
  c.validate();
  require_gridworld(c, "table1");
  const OutputSink sink(c);
  const auto problem = make_gridworld_problem(c);
  std::vector<Table1Run> runs;
  {
    auto out = sink.open("table1_runs.csv");
    CsvWriter csv(out, sink.stamp("table1 runs", c.seed),
                  {"run", "seed", "approach", "accuracy", "q_mse", "cosine", "cosine_sample", "fit_objective"});
    for (int r = 0; r < c.repetitions; ++r) {
      runs.push_back(table1_run(problem, c, r));
      for (const bool aware : {false, true}) {
        const auto& m = aware ? runs.back().gamps : runs.back().ml;
        csv.write_row({std::to_string(r), std::to_string(rep_seed(c, r)), aware ? "GAMPS" : "ML", cell(m.accuracy),
                       cell(m.q_mse), cell(m.cosine), cell(m.cosine_sample), cell(m.fit_objective)});
      }
    }
  }
  auto out = sink.open("table1.csv");
  CsvWriter csv(out, sink.stamp("table1 (mean and 95% CI half-width over runs)", c.seed),
                {"approach", "runs", "accuracy", "accuracy_ci95", "q_mse", "q_mse_ci95", "cosine", "cosine_ci95",
                 "cosine_sample", "cosine_sample_ci95"});
  for (const bool aware : {false, true}) {
    std::vector<double> acc, mse, cos, cos_s;
    for (const auto& run : runs) {
      const auto& m = aware ? run.gamps : run.ml;
      acc.push_back(m.accuracy);
      mse.push_back(m.q_mse);
      cos.push_back(m.cosine);
      cos_s.push_back(m.cosine_sample);
    }
    std::vector<std::string> row{aware ? "GAMPS" : "ML", std::to_string(runs.size())};
    for (const auto* xs : {&acc, &mse, &cos, &cos_s}) {
      const auto mc = mean_ci(*xs);
      row.push_back(cell(mc.mean));
      row.push_back(mc.ci95 ? cell(*mc.ci95) : "");
    }
    csv.write_row(row);
  }
  return runs;
}

struct BoundRow {
  std::string source;
  int instance{0};
  BoundReport report;
  [[nodiscard]] bool ordered(double rel_tol = 1e-9) const {
    const auto leq = [rel_tol](double a, double b) { return a <= b + rel_tol * std::max(1.0, std::abs(b)); };
    return leq(report.lhs, report.rhs_theorem1) && leq(report.rhs_theorem1, report.rhs_proposition);
  }
};

/// The bound on an independent random suite of small MDPs.
inline std::vector<BoundRow> random_bound_suite(std::uint64_t seed, int count, int max_states, int max_actions,
                                                double perturbation) {
  std::vector<BoundRow> rows;
  for (int i = 0; i < count; ++i) {
    auto rng = derive_rng(seed, static_cast<std::uint64_t>(i));
    const auto inst = random_instance(rng, max_states, max_actions, perturbation);
    rows.push_back({"random", i, mvg_bias_bound(inst.mdp, inst.p_hat, inst.policy)});
  }
  return rows;
}

/// Bound triples for the fitted ML and gradient-aware models, perturbed
/// gridworld kernels and the random suite.
inline std::vector<BoundRow> cmd_bounds(const ExperimentConfig& c) {
  c.validate();
  require_gridworld(c, "bounds");
  const OutputSink sink(c);
  const auto problem = make_gridworld_problem(c);
  TabularMdp mdp = problem.true_mdp();
  mdp.discount = c.training.gamma;
  const QNorm q = c.training.q;
  std::vector<BoundRow> rows;
  for (int r = 0; r < c.repetitions; ++r) {
    const auto pi = behavior_policy(problem, c, r);
    const auto train = collect_for(problem, c, pi, r, c.data.n_train, streams::kTrainData);
    rows.push_back({"true_model", r, mvg_bias_bound(mdp, mdp.kernel, pi, q)});
    for (const bool aware : {false, true}) {
      const auto w = aware ? gamps_dataset_weights(train, pi, mdp.discount, q) : uniform_dataset_weights(train);
      const auto [model, report] = fit_weighted(problem.env(), train, w, c.training.fit);
      rows.push_back({aware ? "gamps_fit" : "ml_fit", r,
                      mvg_bias_bound(mdp, export_tabular_kernel(model, problem.env()), pi, q)});
    }
  }
  const auto pi0 = behavior_policy(problem, c, 0);
  for (int i = 0; i < c.bounds.random_instances; ++i) {
    auto rng = derive_rng(derive_seed(c.seed, streams::kBounds), static_cast<std::uint64_t>(i));
    Matrix p_hat = mdp.kernel;
    for (Eigen::Index row = 0; row < p_hat.rows(); ++row) {
      const double eps = c.bounds.perturbation * uniform01(rng);
      p_hat.row(row) = (1.0 - eps) * mdp.kernel.row(row) +
                       eps * random_simplex(static_cast<int>(p_hat.cols()), rng).transpose();
    }
    rows.push_back({"perturbed_gridworld", i, mvg_bias_bound(mdp, p_hat, pi0, q)});
  }
  for (auto& row : random_bound_suite(derive_seed(c.seed, streams::kBounds + 100), c.bounds.random_instances,
                                      c.bounds.max_states, c.bounds.max_actions, c.bounds.perturbation)) {
    rows.push_back(std::move(row));
  }
  auto out = sink.open("bounds.csv");
  CsvWriter csv(out, sink.stamp("bounds q=" + to_string(q), c.seed),
                {"source", "instance", "lhs", "rhs_theorem1", "rhs_proposition", "rhs_theorem1_scaled", "z", "k",
                 "kl_eta", "kl_delta", "ordered"});
  for (const auto& row : rows) {
    const auto& b = row.report;
    csv.write_row({row.source, std::to_string(row.instance), cell(b.lhs), cell(b.rhs_theorem1),
                   cell(b.rhs_proposition), cell(b.rhs_theorem1_scaled), cell(b.z), cell(b.k), cell(b.kl_eta),
                   cell(b.kl_delta), row.ordered() ? "1" : "0"});
  }
  return rows;
}

/// GAMPS on small gridworld datasets with each score norm.
inline std::vector<std::vector<RunLog>> cmd_qstudy(const ExperimentConfig& c) {
  c.validate();
  require_gridworld(c, "qstudy");
  const OutputSink sink(c);
  const auto problem = make_gridworld_problem(c);
  std::vector<std::vector<RunLog>> all;
  auto runs_out = sink.open("qstudy_runs.csv");
  auto columns = runlog_columns();
  columns.insert(columns.begin(), {"q", "repetition"});
  CsvWriter runs_csv(runs_out, sink.stamp("qstudy runs", c.seed), columns);
  for (const QNorm q : c.qstudy.norms) {
    std::vector<RunLog> logs;
    for (int r = 0; r < c.repetitions; ++r) {
      const auto pi = behavior_policy(problem, c, r);
      const auto data = collect_for(problem, c, pi, r, c.qstudy.n_train, streams::kTrainData);
      TrainConfig t = training_for_rep(c, r);
      t.q = q;
      t.estimator = Estimator::kGamps;
      logs.push_back(run_gamps(problem, data, pi, t));
      for (const auto& rec : logs.back().records) {
        runs_csv.write_row({to_string(q), std::to_string(r), std::to_string(rec.iteration + 1), cell(rec.mean_return),
                            cell(rec.std_return), cell(rec.grad_norm), cell(rec.ess), cell(rec.fit_objective),
                            cell(rec.wall_time_ms)});
      }
    }
    auto out = sink.open("qstudy_q" + to_string(q) + ".csv");
    write_aggregate(out, logs, c.training.iterations, sink.stamp("qstudy q=" + to_string(q), c.seed));
    all.push_back(std::move(logs));
  }
  return all;
}

}  // namespace gamps

#endif  // GAMPS_HARNESS_COMMANDS_HPP
