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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qni/channels.hpp"
#include "qni/correlation.hpp"
#include "qni/error.hpp"
#include "qni/measure.hpp"
#include "qni/prep.hpp"
#include "qni/topology.hpp"
#include "qni/varopt.hpp"

namespace qni {

/// qubit -> measurement node, total over [0, N_q).
struct QubitNodeAssignment {
  std::vector<int> node_of;

  int num_qubits() const { return static_cast<int>(node_of.size()); }
};

inline QubitNodeAssignment assignment_of(const NetworkTopology& t) {
  return QubitNodeAssignment{node_of_qubit(t)};
}

struct InferenceResult {
  NetworkTopology topology;
  CorrelationMatrix binary;
  double threshold = 0.0;
  int n_sources = 0;
};

/// Reconstructs the source partition from a binarized qubit matrix:
/// qubits with equal rows share a source, all-zero rows become singleton
/// sources, and nodes come from the assignment. The grouping must form
/// clean blocks (within-group off-diagonals 1, cross-group 0); anything
/// else signals a thresholding artifact or a non-network state and throws
/// InconsistentCorrelationStructure naming a witness.
inline InferenceResult decode_topology(const CorrelationMatrix& binary,
                                       const QubitNodeAssignment& assignment, double threshold = 0.0) {
  require(binary.kind == MatrixKind::Binary, Errc::BadArity, "decode expects a binary matrix");
  const int n = binary.size();
  require(assignment.num_qubits() == n, Errc::SizeMismatch,
          "assignment does not cover the matrix qubits");
  const Eigen::MatrixXd& b = binary.entries;
  require((b - b.transpose()).cwiseAbs().maxCoeff() == 0.0, Errc::BadArity,
          "binary matrix must be symmetric");

  // Group rows: zero rows are singletons, equal nonzero rows share a source.
  std::vector<std::vector<int>> groups;
  std::map<std::vector<int>, int> group_of_row;
  for (int q = 0; q < n; ++q) {
    std::vector<int> row(static_cast<std::size_t>(n));
    bool zero = true;
    for (int c = 0; c < n; ++c) {
      row[static_cast<std::size_t>(c)] = b(q, c) != 0.0 ? 1 : 0;
      zero = zero && row[static_cast<std::size_t>(c)] == 0;
    }
    if (zero) {
      groups.push_back({q});
      continue;
    }
    const auto it = group_of_row.find(row);
    if (it == group_of_row.end()) {
      group_of_row[row] = static_cast<int>(groups.size());
      groups.push_back({q});
    } else {
      groups[static_cast<std::size_t>(it->second)].push_back(q);
    }
  }

  // Block-consistency check.
  std::vector<int> group_of(static_cast<std::size_t>(n), -1);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int q : groups[g]) group_of[static_cast<std::size_t>(q)] = static_cast<int>(g);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool same_group = group_of[static_cast<std::size_t>(i)] == group_of[static_cast<std::size_t>(j)];
      const bool linked = b(i, j) != 0.0;
      if (same_group == linked) continue;
      // Name a witness: a transitivity violation when one exists.
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (b(i, j) != 0.0 && b(i, k) != b(j, k))
          raise(Errc::InconsistentCorrelationStructure,
                "rows disagree on triple (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                    std::to_string(k) + ")");
      }
      raise(Errc::InconsistentCorrelationStructure,
            "entries disagree on pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }

  // Nodes from the assignment, indexed densely in first-appearance order.
  std::vector<std::vector<int>> nodes;
  std::map<int, int> node_index;
  for (int q = 0; q < n; ++q) {
    const int node = assignment.node_of[static_cast<std::size_t>(q)];
    const auto it = node_index.find(node);
    if (it == node_index.end()) {
      node_index[node] = static_cast<int>(nodes.size());
      nodes.push_back({q});
    } else {
      nodes[static_cast<std::size_t>(it->second)].push_back(q);
    }
  }

  InferenceResult result;
  result.topology = make_topology(n, groups, nodes);
  result.binary = binary;
  result.threshold = threshold;
  result.n_sources = static_cast<int>(groups.size());
  return result;
}

// ---------------------------------------------------------------------------
// Node-level comparisons.

struct MatrixMatch {
  bool equal = false;
  std::vector<int> permutation;  // row p[i] of `a` corresponds to row i of `b`

  explicit operator bool() const { return equal; }
};

namespace detail {

inline bool extend_matrix_permutation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol,
                                      std::vector<int>& perm, std::vector<bool>& used, int row) {
  const int n = static_cast<int>(a.rows());
  if (row == n) return true;
  for (int cand = 0; cand < n; ++cand) {
    if (used[static_cast<std::size_t>(cand)]) continue;
    if (std::abs(a(cand, cand) - b(row, row)) > tol) continue;
    bool ok = true;
    for (int prev = 0; ok && prev < row; ++prev)
      if (std::abs(a(cand, perm[static_cast<std::size_t>(prev)]) - b(row, prev)) > tol) ok = false;
    if (!ok) continue;
    used[static_cast<std::size_t>(cand)] = true;
    perm[static_cast<std::size_t>(row)] = cand;
    if (extend_matrix_permutation(a, b, tol, perm, used, row + 1)) return true;
    used[static_cast<std::size_t>(cand)] = false;
  }
  return false;
}

}  // namespace detail

/// Do the two node-level matrices agree entrywise, within tol, under some
/// simultaneous row/column permutation? Returns the witnessing permutation
/// when they do.
inline MatrixMatch compare_node_matrices(const CorrelationMatrix& a, const CorrelationMatrix& b,
                                         double tol) {
  require(a.size() == b.size(), Errc::SizeMismatch, "matrices have different sizes");
  MatrixMatch match;
  match.permutation.assign(static_cast<std::size_t>(a.size()), -1);
  std::vector<bool> used(static_cast<std::size_t>(a.size()), false);
  match.equal = detail::extend_matrix_permutation(a.entries, b.entries, tol, match.permutation, used, 0);
  if (!match.equal) match.permutation.clear();
  return match;
}

/// Divides observed node-level mutual informations by the single-pair
/// depolarized value I(gamma) and rounds, recovering shared-source counts
/// when the noise strength is known. Diagonals (noise-invariant entropies)
/// pass through. Residuals above 0.3 mark the recovery unreliable.
struct RecoveredCounts {
  CorrelationMatrix matrix;
  Eigen::MatrixXd residuals;
  double max_residual = 0.0;
  bool reliable = true;
};

inline RecoveredCounts recover_counts_known_noise(const CorrelationMatrix& observed, double gamma) {
  require(gamma >= 0.0 && gamma < 1.0, Errc::ParameterOutOfRange, "noise strength must be in [0, 1)");
  const double unit = theory::source_depolarized_pair_mi(gamma);
  require(unit > 1e-12, Errc::FullyDepolarized, "per-pair mutual information vanishes");
  const int n = observed.size();
  RecoveredCounts out;
  out.residuals = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd counts = observed.entries;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double scaled = observed.entries(i, j) / unit;
      counts(i, j) = std::round(scaled);
      out.residuals(i, j) = std::abs(scaled - counts(i, j));
    }
  out.max_residual = out.residuals.maxCoeff();
  out.reliable = out.max_residual <= 0.3;
  out.matrix = make_correlation_matrix(observed.kind, std::move(counts));
  return out;
}

/// Brute-force search for topologies whose expected node-level matrix
/// equals `target` (nodes labeled, sources unlabeled). Exponential in the
/// qubit count; capped at 6 qubits. Experimental: a general polynomial
/// decoder for node-level matrices is an open problem.
inline std::vector<NetworkTopology> match_node_matrix_exhaustive(const CorrelationMatrix& target,
                                                                 int num_qubits) {
  require(num_qubits >= 1 && num_qubits <= 6, Errc::ParameterOutOfRange,
          "exhaustive search is capped at 6 qubits");
  const int num_nodes = target.size();
  std::vector<NetworkTopology> matches;

  // Enumerate source partitions via restricted growth strings.
  std::vector<int> rgs(static_cast<std::size_t>(num_qubits), 0);
  auto max_prefix = [&](int upto) {
    int m = -1;
    for (int i = 0; i < upto; ++i) m = std::max(m, rgs[static_cast<std::size_t>(i)]);
    return m;
  };
  // Enumerate node assignments (surjections onto [num_nodes]).
  std::vector<int> node_of(static_cast<std::size_t>(num_qubits), 0);
  const auto try_candidate = [&]() {
    const int num_sources = max_prefix(num_qubits) + 1;
    std::vector<std::vector<int>> sources(static_cast<std::size_t>(num_sources));
    for (int q = 0; q < num_qubits; ++q)
      sources[static_cast<std::size_t>(rgs[static_cast<std::size_t>(q)])].push_back(q);
    std::vector<std::vector<int>> nodes(static_cast<std::size_t>(num_nodes));
    for (int q = 0; q < num_qubits; ++q)
      nodes[static_cast<std::size_t>(node_of[static_cast<std::size_t>(q)])].push_back(q);
    for (const auto& node : nodes)
      if (node.empty()) return;
    const NetworkTopology t{num_qubits, sources, nodes};
    if (!satisfies_one_qubit_per_node(t)) return;
    const CorrelationMatrix m = expected_characteristic_matrix(t);
    if ((m.entries - target.entries).cwiseAbs().maxCoeff() <= 1e-9) matches.push_back(t);
  };

  // Nested enumeration, sources outer, assignments inner.
  const auto enumerate_assignments = [&]() {
    std::fill(node_of.begin(), node_of.end(), 0);
    while (true) {
      try_candidate();
      int pos = num_qubits - 1;
      while (pos >= 0 && node_of[static_cast<std::size_t>(pos)] == num_nodes - 1) {
        node_of[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
      node_of[static_cast<std::size_t>(pos)] += 1;
    }
  };
  while (true) {
    enumerate_assignments();
    int pos = num_qubits - 1;
    while (pos > 0 && rgs[static_cast<std::size_t>(pos)] == max_prefix(pos) + 1) {
      rgs[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos == 0) break;
    rgs[static_cast<std::size_t>(pos)] += 1;
  }
  return matches;
}

// ---------------------------------------------------------------------------
// End-to-end pipeline.

enum class InferMethod { Covariance, CharacteristicPerPair, CharacteristicShared };

inline const char* infer_method_name(InferMethod m) {
  switch (m) {
    case InferMethod::Covariance: return "covariance";
    case InferMethod::CharacteristicPerPair: return "char-per-pair";
    case InferMethod::CharacteristicShared: return "char-shared";
  }
  return "unknown";
}

/// The simulated experiment: ground-truth topology, per-source
/// preparations, optional per-qubit link channels and per-source joint
/// depolarizing noise.
struct PipelineInput {
  NetworkTopology topology;
  std::vector<StatePrep> preps;
  std::vector<KrausChannel> link_channels;          // empty or one per qubit
  std::optional<double> source_depolarizing_gamma;  // joint noise per source
};

struct PipelineOptions {
  InferMethod method = InferMethod::Covariance;
  OptimizerConfig optimizer;
  double threshold = 0.05;
  ShotConfig shots;
  std::optional<CorrelationMatrix> ideal;  // enables inference-error reporting
};

struct NamedTrace {
  std::string label;
  OptimizationTrace trace;
};

struct PipelineOutcome {
  InferenceResult result;
  CorrelationMatrix matrix;         // entries evaluated at the selected settings
  CorrelationMatrix stepwise_best;  // entrywise best over every step and restart
  std::vector<NamedTrace> traces;
  std::vector<double> error_series;  // d(matrix_t, ideal) along the main trace
  double final_error = std::numeric_limits<double>::quiet_NaN();
};

inline DensityMatrix realize_network_state(const PipelineInput& input) {
  DensityMatrix state = prepare_network_state(input.topology, input.preps);
  if (input.source_depolarizing_gamma.has_value()) {
    for (const auto& src : input.topology.sources)
      state = apply_channel_on_qubits(
          state, depolarizing_channel(*input.source_depolarizing_gamma, static_cast<int>(src.size())), src);
  }
  if (!input.link_channels.empty()) state = apply_link_channels(state, input.link_channels);
  return state;
}

namespace detail {

inline void entrywise_best(Eigen::MatrixXd& best, const Eigen::MatrixXd& candidate, MatrixKind kind) {
  // Characteristic diagonals are entropy minimizations; everything else is
  // maximized.
  for (int i = 0; i < best.rows(); ++i)
    for (int j = 0; j < best.cols(); ++j) {
      const bool minimize = (kind == MatrixKind::Characteristic) && i == j;
      best(i, j) = minimize ? std::min(best(i, j), candidate(i, j))
                            : std::max(best(i, j), candidate(i, j));
    }
}

}  // namespace detail

/// Runs the full protocol: realize the state, variationally optimize the
/// chosen correlation matrix, binarize at the threshold and decode.
///
/// Covariance / CharacteristicShared optimize one shared basis for the
/// off-diagonal structure (the diagonal of the characteristic matrix comes
/// from per-qubit entropy minimizations, as on hardware). Per-pair mode
/// optimizes every pair independently. When an ideal matrix is supplied,
/// the covariance method also reports d(C_t, C*) along the best restart.
inline PipelineOutcome infer_pipeline(const PipelineInput& input, const PipelineOptions& options) {
  const PreparedState state(realize_network_state(input));
  const int n = state.num_qubits();
  const std::uint64_t seed = options.optimizer.seed;

  PipelineOutcome outcome;
  const MatrixKind kind =
      options.method == InferMethod::Covariance ? MatrixKind::Covariance : MatrixKind::Characteristic;
  // Running entrywise optimum over steps: correlations (and variances) are
  // maximized, characteristic diagonals (entropies) are minimized.
  Eigen::MatrixXd best = Eigen::MatrixXd::Constant(n, n, -std::numeric_limits<double>::infinity());
  if (kind == MatrixKind::Characteristic)
    for (int q = 0; q < n; ++q) best(q, q) = std::numeric_limits<double>::infinity();

  switch (options.method) {
    case InferMethod::Covariance: {
      OptimizerConfig config = options.optimizer;
      config.seed = derive_seed(seed, 100);
      CostSpec spec = covariance_norm_cost(options.shots);
      const OptimizationResult opt = gradient_descent(state, spec, config);
      outcome.matrix = assemble_qubit_matrix_shared(state, opt.best_final_settings, kind, options.shots,
                                                    derive_seed(seed, 101));
      for (std::size_t t = 0; t < opt.best.settings.size(); ++t) {
        const CorrelationMatrix step = assemble_qubit_matrix_shared(
            state, opt.best.settings[t], kind, options.shots,
            derive_seed(seed, {102, static_cast<std::uint64_t>(t)}));
        detail::entrywise_best(best, step.entries, kind);
        if (options.ideal.has_value())
          outcome.error_series.push_back(inference_error(step, *options.ideal));
      }
      outcome.traces.push_back({"covariance-norm", opt.best});
      break;
    }
    case InferMethod::CharacteristicShared: {
      Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(n, n);
      // Diagonal: per-qubit Shannon entropy minimization.
      for (int q = 0; q < n; ++q) {
        OptimizerConfig config = options.optimizer;
        config.seed = derive_seed(seed, {200, static_cast<std::uint64_t>(q)});
        const OptimizationResult opt =
            gradient_descent(state, vn_entropy_cost(q, options.shots), config);
        entries(q, q) = opt.best_final_cost;
        best(q, q) = opt.best_step_cost;
        outcome.traces.push_back({"entropy-q" + std::to_string(q), opt.best});
      }
      // Off-diagonals: one shared basis maximizing total pairwise MI.
      OptimizerConfig config = options.optimizer;
      config.seed = derive_seed(seed, 201);
      const OptimizationResult opt =
          gradient_descent(state, classical_mi_network_cost(options.shots), config);
      const CorrelationMatrix at_best = assemble_qubit_matrix_shared(
          state, opt.best_final_settings, MatrixKind::Characteristic, options.shots,
          derive_seed(seed, 202));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) entries(i, j) = at_best.entries(i, j);
      for (std::size_t t = 0; t < opt.best.settings.size(); ++t) {
        const CorrelationMatrix step = assemble_qubit_matrix_shared(
            state, opt.best.settings[t], MatrixKind::Characteristic, options.shots,
            derive_seed(seed, {203, static_cast<std::uint64_t>(t)}));
        Eigen::MatrixXd offdiag = step.entries;
        for (int q = 0; q < n; ++q) offdiag(q, q) = -std::numeric_limits<double>::infinity();
        detail::entrywise_best(best, offdiag, MatrixKind::Covariance);
      }
      outcome.traces.push_back({"classical-mi", opt.best});
      outcome.matrix = make_correlation_matrix(MatrixKind::Characteristic, std::move(entries));
      break;
    }
    case InferMethod::CharacteristicPerPair: {
      Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(n, n);
      for (int q = 0; q < n; ++q) {
        OptimizerConfig config = options.optimizer;
        config.seed = derive_seed(seed, {300, static_cast<std::uint64_t>(q)});
        const OptimizationResult opt =
            gradient_descent(state, vn_entropy_cost(q, options.shots), config);
        entries(q, q) = opt.best_final_cost;
        best(q, q) = opt.best_step_cost;
        outcome.traces.push_back({"entropy-q" + std::to_string(q), opt.best});
      }
      // Pairs are processed in rounds of disjoint pairs; each round's
      // optimizations touch different qubits and could run as one batch.
      for (const auto& round : pair_schedule(n))
        for (const auto& [i, j] : round) {
          OptimizerConfig config = options.optimizer;
          config.seed = derive_seed(
              seed, {301, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
          const OptimizationResult opt =
              gradient_descent(state, measured_mi_pair_cost(i, j, options.shots), config);
          entries(i, j) = entries(j, i) = -opt.best_final_cost;
          best(i, j) = best(j, i) = -opt.best_step_cost;
          outcome.traces.push_back(
              {"mi-q" + std::to_string(i) + "q" + std::to_string(j), opt.best});
        }
      outcome.matrix = make_correlation_matrix(MatrixKind::Characteristic, std::move(entries));
      break;
    }
  }

  outcome.stepwise_best = make_correlation_matrix(kind, std::move(best));

  if (options.ideal.has_value()) outcome.final_error = inference_error(outcome.matrix, *options.ideal);

  const CorrelationMatrix binary = binarize(outcome.matrix, options.threshold);
  outcome.result = decode_topology(binary, assignment_of(input.topology), options.threshold);
  return outcome;
}

}  // namespace qni
