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

#pragma once

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "qni/config.hpp"
#include "qni/correlation.hpp"
#include "qni/infer.hpp"
#include "qni/serialize.hpp"

namespace qni {

// Process exit codes shared by all commands.
//   0 ok, 1 comparison-negative, 2 config error, 3 physics error,
//   4 inconsistent correlation structure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDifferent = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPhysics = 3;
inline constexpr int kExitInconsistent = 4;

namespace detail {

inline std::string bitstring(Eigen::Index value, int bits) {
  std::string s(static_cast<std::size_t>(bits), '0');
  for (int b = 0; b < bits; ++b)
    if ((value >> (bits - 1 - b)) & 1) s[static_cast<std::size_t>(b)] = '1';
  return s;
}

inline void write_distribution_csv(const std::filesystem::path& path, const OutcomeDistribution& dist) {
  std::string out;
  const bool empirical = dist.mode == OutcomeDistribution::Mode::Empirical;
  out += empirical ? "outcome,count\n" : "outcome,probability\n";
  for (Eigen::Index b = 0; b < dist.num_outcomes(); ++b) {
    out += bitstring(b, dist.num_bits);
    out += ',';
    out += empirical ? std::to_string(dist.counts[static_cast<std::size_t>(b)])
                     : format_double(dist.probs[b]);
    out += '\n';
  }
  atomic_write(path, out);
}

inline void write_matrix_files(const std::filesystem::path& dir, const std::string& stem,
                               const CorrelationMatrix& m) {
  atomic_write(dir / (stem + ".csv"), matrix_to_csv(m));
  atomic_write(dir / (stem + ".json"), to_json(m).dump(2) + "\n");
}

}  // namespace detail

// Sending several qubits of one source to a node is legal for qubit-level
// inference but breaks the GHZ-mode node-level analysis; worth a warning.
inline void warn_on_assumption_violations(const NetworkTopology& topology) {
  if (!satisfies_one_qubit_per_node(topology))
    std::cerr << "warning: a source sends more than one qubit to a single node; "
                 "node-level characteristic matrices are not meaningful for this network\n";
}

/// Assembles the configured correlation matrix at fixed (non-optimized)
/// measurement settings and dumps it together with the raw outcome
/// distribution of the full register under those settings.
inline int cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  warn_on_assumption_violations(config.topology);
  const PipelineInput input = build_pipeline_input(config);
  const PreparedState state(realize_network_state(input));
  const MeasurementSettings settings =
      config.settings.value_or(uniform_settings(state.num_qubits(), computational_basis_angles()));
  const MatrixKind kind =
      config.method == InferMethod::Covariance ? MatrixKind::Covariance : MatrixKind::Characteristic;

  const CorrelationMatrix matrix = assemble_qubit_matrix_shared(
      state, settings, kind, config.shots, derive_seed(config.optimizer.seed, 0xD1));
  detail::write_matrix_files(out_dir, "matrix", matrix);

  OutcomeDistribution dist = state.joint_distribution(settings);
  if (!config.shots.analytic())
    dist = sample_outcomes(dist, *config.shots.shots, derive_seed(config.optimizer.seed, 0xD2));
  detail::write_distribution_csv(out_dir / "distribution.csv", dist);
  return kExitOk;
}

/// Runs the full variational inference pipeline and writes the decoded
/// topology, the optimized matrix, per-step traces and, when the config
/// carries an ideal matrix, the inference-error series.
inline int cmd_infer(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  warn_on_assumption_violations(config.topology);
  PipelineOptions options;
  options.method = config.method;
  options.optimizer = config.optimizer;
  options.threshold = config.threshold;
  options.shots = config.shots;
  options.ideal = config.ideal;

  const PipelineOutcome outcome = infer_pipeline(build_pipeline_input(config), options);

  nlohmann::json result = to_json(outcome.result);
  result["method"] = infer_method_name(config.method);
  result["seed"] = config.optimizer.seed;
  result["residuals"] = to_json(outcome.matrix);  // raw values behind the binarization
  atomic_write(out_dir / "result.json", result.dump(2) + "\n");

  detail::write_matrix_files(out_dir, "matrix", outcome.matrix);
  detail::write_matrix_files(out_dir, "matrix_stepwise_best", outcome.stepwise_best);

  std::string trace_csv = "optimization,step,cost\n";
  for (const auto& [label, trace] : outcome.traces)
    for (std::size_t t = 0; t < trace.costs.size(); ++t)
      trace_csv += label + "," + std::to_string(t) + "," + format_double(trace.costs[t]) + "\n";
  atomic_write(out_dir / "trace.csv", trace_csv);

  nlohmann::json traces_json = nlohmann::json::array();
  for (const auto& [label, trace] : outcome.traces)
    traces_json.push_back({{"label", label}, {"trace", to_json(trace)}});
  atomic_write(out_dir / "trace.json", traces_json.dump(2) + "\n");

  if (config.ideal.has_value()) {
    std::string err_csv = "step,error\n";
    for (std::size_t t = 0; t < outcome.error_series.size(); ++t)
      err_csv += std::to_string(t) + "," + format_double(outcome.error_series[t]) + "\n";
    if (outcome.error_series.empty())
      err_csv += "final," + format_double(outcome.final_error) + "\n";
    atomic_write(out_dir / "inference_error.csv", err_csv);
  }
  return kExitOk;
}

/// Sweeps a noise grid on a two-qubit Bell link and writes theory vs
/// optimized correlation curves. Each gamma runs `trials` independent
/// optimizations for the pair mutual information and for the covariance.
inline int cmd_sweep_noise(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  require(config.topology.num_qubits == 2, Errc::ConfigError,
          "noise sweeps are defined for a two-qubit network");
  require(!config.gamma_grid.empty(), Errc::ConfigError, "noise sweep needs a gamma grid");
  ChannelSpec::Kind kind = ChannelSpec::Kind::Depolarizing;
  for (const auto& ch : config.channels)
    if (ch.kind != ChannelSpec::Kind::None) kind = ch.kind;
  std::filesystem::create_directories(out_dir);

  std::string csv = "gamma,mi_theory,mi_best,mi_mean,mi_stderr,cov_theory,cov_best,cov_mean,cov_stderr\n";
  for (double gamma : config.gamma_grid) {
    ExperimentConfig at_gamma = config;
    for (auto& ch : at_gamma.channels) {
      ch.kind = kind;
      ch.gamma = gamma;
    }
    const PreparedState state(realize_network_state(build_pipeline_input(at_gamma)));

    std::vector<double> mi_values, cov_values;
    for (int trial = 0; trial < config.trials; ++trial) {
      // Each trial is an independent run of the configured optimizer (set
      // restarts to 1 in the config to mimic single-start trials).
      OptimizerConfig opt = config.optimizer;
      opt.seed = derive_seed(config.optimizer.seed,
                             {0x5E, static_cast<std::uint64_t>(std::llround(gamma * 1000)),
                              static_cast<std::uint64_t>(trial)});
      const OptimizationResult mi_run =
          gradient_descent(state, measured_mi_pair_cost(0, 1, config.shots), opt);
      mi_values.push_back(-mi_run.best_final_cost);

      opt.seed = derive_seed(opt.seed, 1);
      const OptimizationResult cov_run =
          gradient_descent(state, covariance_norm_cost(config.shots), opt);
      const Eigen::Vector4d f = state.pair_distribution(0, 1, cov_run.best_final_settings.angles[0],
                                                        cov_run.best_final_settings.angles[1]);
      OutcomeDistribution pair_dist;
      pair_dist.mode = OutcomeDistribution::Mode::Analytic;
      pair_dist.num_bits = 2;
      pair_dist.probs = f;
      cov_values.push_back(std::abs(covariance(pair_dist)));
    }

    auto stats = [](const std::vector<double>& v) {
      double best = v[0], mean = 0.0;
      for (double x : v) {
        best = std::max(best, x);
        mean += x;
      }
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double stderr_ = v.size() > 1 ? std::sqrt(var / (static_cast<double>(v.size()) - 1.0) /
                                                      static_cast<double>(v.size()))
                                          : 0.0;
      return std::array<double, 3>{best, mean, stderr_};
    };
    const auto [mi_best, mi_mean, mi_se] = stats(mi_values);
    const auto [cov_best, cov_mean, cov_se] = stats(cov_values);
    const double mi_theory = kind == ChannelSpec::Kind::Depolarizing
                                 ? theory::depolarized_bell_mi(gamma)
                                 : theory::amplitude_damped_bell_mi(gamma);
    const double cov_theory = kind == ChannelSpec::Kind::Depolarizing
                                  ? theory::depolarized_bell_covariance(gamma)
                                  : theory::amplitude_damped_bell_covariance(gamma);
    csv += format_double(gamma) + "," + format_double(mi_theory) + "," + format_double(mi_best) +
           "," + format_double(mi_mean) + "," + format_double(mi_se) + "," +
           format_double(cov_theory) + "," + format_double(cov_best) + "," +
           format_double(cov_mean) + "," + format_double(cov_se) + "\n";
  }
  atomic_write(out_dir / "sweep.csv", csv);
  return kExitOk;
}

/// Compares two node-level matrices up to simultaneous row/column
/// permutation; prints the witnessing permutation on success.
inline int cmd_compare(const std::filesystem::path& file_a, const std::filesystem::path& file_b,
                       double tol) {
  const CorrelationMatrix a = load_matrix_file(file_a);
  const CorrelationMatrix b = load_matrix_file(file_b);
  if (a.size() != b.size()) {
    std::cout << "different: sizes " << a.size() << " vs " << b.size() << "\n";
    return kExitDifferent;
  }
  const MatrixMatch match = compare_node_matrices(a, b, tol);
  if (!match.equal) {
    std::cout << "different\n";
    return kExitDifferent;
  }
  std::cout << "equivalent, permutation:";
  for (int p : match.permutation) std::cout << ' ' << p;
  std::cout << "\n";
  return kExitOk;
}

}  // namespace qni
