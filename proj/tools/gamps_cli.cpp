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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gamps/error.hpp"
#include "gamps/harness/commands.hpp"
#include "gamps/harness/config.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 1;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<std::string> out;
  std::optional<std::string> estimator;
  std::optional<std::string> data_dir;
  std::optional<std::string> policy_file;
  bool timing{false};
};

gamps::ExperimentConfig resolve(const Options& o) {
  gamps::ExperimentConfig c = o.config_path.empty() ? gamps::default_config(gamps::EnvKind::kGridworld)
                                                     : gamps::load_config(o.config_path);
  if (o.seed) {
    c.seed = *o.seed;
  }
  if (o.reps) {
    c.repetitions = *o.reps;
  }
  if (o.out) {
    c.output_dir = *o.out;
  }
  if (o.estimator) {
    c.training.estimator = gamps::parse_estimator(*o.estimator);
  }
  c.training.timing = o.timing;
  c.validate();
  return c;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "experiment configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--reps", o.reps, "number of repetitions")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--estimator", o.estimator, "gamps, ml, reinforce or pgt")
      ->check(CLI::IsMember({"gamps", "ml", "reinforce", "pgt"}));
  cmd->add_flag("--timing", o.timing, "record wall-clock times in run logs (outputs are no longer reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-aware model-based policy search experiments"};
  app.require_subcommand(1);
  Options o;

  auto* collect = app.add_subcommand("collect", "collect behavior-policy datasets");
  auto* train = app.add_subcommand("train", "train a policy on a fixed dataset");
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a policy in the true environment");
  auto* table1 = app.add_subcommand("table1", "model and gradient estimation metrics, ML vs GAMPS");
  auto* bounds = app.add_subcommand("bounds", "gradient bias against the KL bounds");
  auto* qstudy = app.add_subcommand("qstudy", "GAMPS with different score norms");
  for (auto* cmd : {collect, train, evaluate, table1, bounds, qstudy}) {
    add_common(cmd, o);
  }
  train->add_option("--data", o.data_dir, "directory written by collect (default: collect in memory)");
  evaluate->add_option("--policy", o.policy_file, "policy JSON written by train (default: behavior policy)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const gamps::ExperimentConfig c = resolve(o);
    if (collect->parsed()) {
      for (const auto& f : gamps::cmd_collect(c)) {
        std::cout << f.string() << '\n';
      }
    } else if (train->parsed()) {
      gamps::TrainOptions opts;
      if (o.data_dir) {
        opts.data_dir = std::filesystem::path(*o.data_dir);
      }
      const auto logs = gamps::cmd_train(c, opts);
      for (std::size_t r = 0; r < logs.size(); ++r) {
        std::cout << "repetition " << r << ": best return " << logs[r].best_mean_return() << ", final return "
                  << logs[r].final_mean_return() << (logs[r].ess_stopped ? " (stopped on ESS)" : "") << '\n';
      }
    } else if (evaluate->parsed()) {
      for (const auto& s : gamps::cmd_evaluate(c, o.policy_file)) {
        std::cout << s.mean << " +- " << s.std << '\n';
      }
    } else if (table1->parsed()) {
      gamps::cmd_table1(c);
      std::cout << (std::filesystem::path(c.output_dir) / "table1.csv").string() << '\n';
    } else if (bounds->parsed()) {
      const auto rows = gamps::cmd_bounds(c);
      std::size_t ordered = 0;
      for (const auto& r : rows) {
        ordered += r.ordered() ? 1U : 0U;
      }
      std::cout << ordered << " of " << rows.size() << " rows satisfy lhs <= rhs_theorem1 <= rhs_proposition\n";
    } else if (qstudy->parsed()) {
      gamps::cmd_qstudy(c);
      std::cout << c.output_dir << '\n';
    }
  } catch (const gamps::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
