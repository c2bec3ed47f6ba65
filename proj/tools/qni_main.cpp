// Copyright 2026 The qni Authors
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
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qni/commands.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> shots;
  std::optional<double> threshold;
  std::optional<std::string> method;
  std::optional<std::string> gamma_grid;
  std::optional<int> trials;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seed", ov.seed, "Master seed override");
  cmd->add_option("--shots", ov.shots, "Shot count or 'analytic'");
  cmd->add_option("--threshold", ov.threshold, "Binarization threshold");
  cmd->add_option("--method", ov.method, "covariance | char-per-pair | char-shared");
  cmd->add_option("--gamma-grid", ov.gamma_grid, "Noise grid 'start:stop:step'");
  cmd->add_option("--trials", ov.trials, "Independent trials per sweep point");
}

qni::ExperimentConfig load_with_overrides(const std::string& config_path, const Overrides& ov) {
  qni::ExperimentConfig config = qni::load_config(config_path);
  if (ov.seed) config.optimizer.seed = *ov.seed;
  if (ov.shots) {
    if (*ov.shots == "analytic") {
      config.shots.shots.reset();
    } else {
      try {
        config.shots.shots = std::stoll(*ov.shots);
      } catch (const std::exception&) {
        qni::raise(qni::Errc::ConfigError, "--shots expects an integer or 'analytic'");
      }
      qni::require(*config.shots.shots >= 1, qni::Errc::ConfigError, "--shots must be at least 1");
    }
  }
  if (ov.threshold) {
    qni::require(*ov.threshold >= 0.0, qni::Errc::ConfigError, "--threshold must be nonnegative");
    config.threshold = *ov.threshold;
  }
  if (ov.method) config.method = qni::infer_method_from_name(*ov.method);
  if (ov.gamma_grid) config.gamma_grid = qni::parse_gamma_grid(*ov.gamma_grid);
  if (ov.trials) {
    qni::require(*ov.trials >= 1, qni::Errc::ConfigError, "--trials must be at least 1");
    config.trials = *ov.trials;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum network topology simulation and inference"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  Overrides ov;

  CLI::App* simulate = app.add_subcommand("simulate", "Correlation matrix at fixed settings");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--out", out_dir, "Output directory");
  add_override_flags(simulate, ov);

  CLI::App* infer = app.add_subcommand("infer", "Variational topology inference");
  infer->add_option("--config", config_path, "Experiment config (JSON)")->required();
  infer->add_option("--out", out_dir, "Output directory");
  add_override_flags(infer, ov);

  CLI::App* sweep = app.add_subcommand("sweep-noise", "Noise curves on a Bell link");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--out", out_dir, "Output directory");
  add_override_flags(sweep, ov);

  std::string matrix_a, matrix_b;
  double tol = 1e-9;
  CLI::App* compare = app.add_subcommand("compare", "Node-matrix equivalence up to relabeling");
  compare->add_option("matrix_a", matrix_a, "First matrix file (.json or .csv)")->required();
  compare->add_option("matrix_b", matrix_b, "Second matrix file (.json or .csv)")->required();
  compare->add_option("--tol", tol, "Entrywise tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qni::kExitConfig;
  }

  try {
    if (simulate->parsed()) return qni::cmd_simulate(load_with_overrides(config_path, ov), out_dir);
    if (infer->parsed()) return qni::cmd_infer(load_with_overrides(config_path, ov), out_dir);
    if (sweep->parsed()) return qni::cmd_sweep_noise(load_with_overrides(config_path, ov), out_dir);
    if (compare->parsed()) return qni::cmd_compare(matrix_a, matrix_b, tol);
  } catch (const qni::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case qni::Errc::ConfigError:
        return qni::kExitConfig;
      case qni::Errc::InconsistentCorrelationStructure:
        return qni::kExitInconsistent;
      default:
        return qni::kExitPhysics;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qni::kExitPhysics;
  }
  return qni::kExitConfig;
}
