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
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "qni/correlation.hpp"
#include "qni/error.hpp"
#include "qni/measure.hpp"
#include "qni/rng.hpp"

namespace qni {

// ---------------------------------------------------------------------------
// Variational measurement optimization.
//
// Every cost is a function of outcome probabilities of parameterized local
// measurements, minimized by plain gradient descent. Gradients use the
// parameter-shift rule at the probability level,
//     dp_a/dt = [p_a(t + pi/2) - p_a(t - pi/2)] / 2,
// exact because each angle generates a rotation with eigenvalue gap 1,
// followed by the analytic chain rule through the cost. Entropy terms have
// d H / d p_a = -(log2 p_a + 1/ln 2); outcomes with p_a below kEigClamp
// are dropped, since their p log p contribution vanishes in the limit.
//
// In finite-shot mode every evaluation (including each shifted one) draws
// a fresh sample with a seed derived from the master seed and the position
// in the optimization, mirroring how hardware runs behave; gradients are
// then noisy estimates by design.

/// What to optimize. Minimizing conventions:
///   VnEntropy(q):            H(P(a_q))           -> von Neumann entropy at the optimum
///   MeasuredMIPair(i, j):    H(a_i, a_j) - H(a_i) - H(a_j) = -I(a_i; a_j)
///   ClassicalMINetwork:      sum over pairs of -I under one shared basis
///   CovarianceNorm:          -tr(C^T C), C the covariance matrix
enum class CostKind { VnEntropy, MeasuredMIPair, ClassicalMINetwork, CovarianceNorm };

struct CostSpec {
  CostKind kind = CostKind::CovarianceNorm;
  int qubit_i = -1;  // VnEntropy, MeasuredMIPair
  int qubit_j = -1;  // MeasuredMIPair
  ShotConfig shots;
};

inline CostSpec vn_entropy_cost(int qubit, ShotConfig shots = {}) {
  return CostSpec{CostKind::VnEntropy, qubit, -1, shots};
}
inline CostSpec measured_mi_pair_cost(int qubit_i, int qubit_j, ShotConfig shots = {}) {
  require(qubit_i != qubit_j, Errc::BadArity, "pair cost needs two distinct qubits");
  if (qubit_i > qubit_j) std::swap(qubit_i, qubit_j);
  return CostSpec{CostKind::MeasuredMIPair, qubit_i, qubit_j, shots};
}
inline CostSpec classical_mi_network_cost(ShotConfig shots = {}) {
  return CostSpec{CostKind::ClassicalMINetwork, -1, -1, shots};
}
inline CostSpec covariance_norm_cost(ShotConfig shots = {}) {
  return CostSpec{CostKind::CovarianceNorm, -1, -1, shots};
}

/// Qubits whose angles the cost actually depends on.
inline std::vector<int> active_qubits(const CostSpec& spec, int num_qubits) {
  switch (spec.kind) {
    case CostKind::VnEntropy:
      require(spec.qubit_i >= 0 && spec.qubit_i < num_qubits, Errc::QubitIndexOutOfRange,
              "cost qubit out of range");
      return {spec.qubit_i};
    case CostKind::MeasuredMIPair:
      require(spec.qubit_i >= 0 && spec.qubit_j < num_qubits && spec.qubit_i < spec.qubit_j,
              Errc::QubitIndexOutOfRange, "cost qubits out of range");
      return {spec.qubit_i, spec.qubit_j};
    case CostKind::ClassicalMINetwork:
    case CostKind::CovarianceNorm: {
      std::vector<int> all(static_cast<std::size_t>(num_qubits));
      for (int q = 0; q < num_qubits; ++q) all[static_cast<std::size_t>(q)] = q;
      return all;
    }
  }
  return {};
}

namespace detail {

// Statistics a cost touches: per-qubit and per-pair outcome frequencies.
struct CostStats {
  std::map<int, Eigen::Vector2d> singles;
  std::map<std::pair<int, int>, Eigen::Vector4d> pairs;
};

inline bool needs_singles(CostKind kind) { return kind != CostKind::ClassicalMINetwork && kind != CostKind::MeasuredMIPair; }

inline std::vector<std::pair<int, int>> cost_pairs(const CostSpec& spec, int num_qubits) {
  std::vector<std::pair<int, int>> pairs;
  switch (spec.kind) {
    case CostKind::VnEntropy:
      break;
    case CostKind::MeasuredMIPair:
      pairs.emplace_back(spec.qubit_i, spec.qubit_j);
      break;
    case CostKind::ClassicalMINetwork:
    case CostKind::CovarianceNorm:
      for (int i = 0; i < num_qubits; ++i)
        for (int j = i + 1; j < num_qubits; ++j) pairs.emplace_back(i, j);
      break;
  }
  return pairs;
}

// Gathers the statistics at `settings`. `restrict_to` (when >= 0) keeps
// only distributions involving that qubit, which is all a parameter shift
// of its angles can change.
inline CostStats gather_stats(const PreparedState& state, const CostSpec& spec,
                              const MeasurementSettings& settings, std::uint64_t seed,
                              int restrict_to = -1) {
  const int n = state.num_qubits();
  require(settings.num_qubits() >= n, Errc::SettingsMismatch, "settings do not cover the register");
  CostStats stats;

  const bool empirical = !spec.shots.analytic();
  const bool network_kind =
      spec.kind == CostKind::ClassicalMINetwork || spec.kind == CostKind::CovarianceNorm;

  Eigen::VectorXd joint;  // sampled full-register frequencies (network kinds)
  if (empirical && network_kind) {
    const OutcomeDistribution full = state.joint_distribution(settings);
    joint = sample_outcomes(full, *spec.shots.shots, seed).frequencies();
  }

  if (needs_singles(spec.kind)) {
    std::vector<int> qubits;
    if (spec.kind == CostKind::VnEntropy)
      qubits.push_back(spec.qubit_i);
    else
      for (int q = 0; q < n; ++q) qubits.push_back(q);
    for (int q : qubits) {
      if (restrict_to >= 0 && q != restrict_to) continue;
      if (empirical && network_kind) {
        const Eigen::VectorXd m = marginal_frequencies(joint, n, {q});
        stats.singles[q] = Eigen::Vector2d(m[0], m[1]);
      } else if (empirical) {
        const Eigen::Vector2d p =
            state.qubit_distribution(q, settings.angles[static_cast<std::size_t>(q)]);
        stats.singles[q] = sample_outcomes(analytic_distribution(1, p), *spec.shots.shots,
                                           derive_seed(seed, {2, static_cast<std::uint64_t>(q)}))
                               .frequencies();
      } else {
        stats.singles[q] = state.qubit_distribution(q, settings.angles[static_cast<std::size_t>(q)]);
      }
    }
  }

  for (const auto& [i, j] : cost_pairs(spec, n)) {
    if (restrict_to >= 0 && i != restrict_to && j != restrict_to) continue;
    if (empirical && network_kind) {
      const Eigen::VectorXd m = marginal_frequencies(joint, n, {i, j});
      stats.pairs[{i, j}] = Eigen::Vector4d(m[0], m[1], m[2], m[3]);
    } else {
      const Eigen::Vector4d p = state.pair_distribution(
          i, j, settings.angles[static_cast<std::size_t>(i)], settings.angles[static_cast<std::size_t>(j)]);
      if (empirical) {
        stats.pairs[{i, j}] =
            sample_outcomes(analytic_distribution(2, p), *spec.shots.shots,
                            derive_seed(seed, {3, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)}))
                .frequencies();
      } else {
        stats.pairs[{i, j}] = p;
      }
    }
  }
  return stats;
}

inline double neg_mi_of_pair(const Eigen::Vector4d& f) { return -mi_of_pair_frequencies(f); }

inline double cost_from_stats(const CostSpec& spec, const CostStats& stats) {
  switch (spec.kind) {
    case CostKind::VnEntropy: {
      const Eigen::Vector2d& p = stats.singles.at(spec.qubit_i);
      return entropy_of_frequencies(p);
    }
    case CostKind::MeasuredMIPair:
      return neg_mi_of_pair(stats.pairs.at({spec.qubit_i, spec.qubit_j}));
    case CostKind::ClassicalMINetwork: {
      double cost = 0.0;
      for (const auto& [key, f] : stats.pairs) cost += neg_mi_of_pair(f);
      return cost;
    }
    case CostKind::CovarianceNorm: {
      double norm = 0.0;
      for (const auto& [q, p] : stats.singles) {
        const double var = variance_from_qubit_frequencies(p);
        norm += var * var;
      }
      for (const auto& [key, f] : stats.pairs) {
        const double cov = covariance_of_pair_frequencies(f);
        norm += 2.0 * cov * cov;
      }
      return -norm;
    }
  }
  return 0.0;
}

inline double entropy_weight(double p) {
  return p > kEigClamp ? -(std::log2(p) + 1.0 / std::numbers::ln2_v<double>) : 0.0;
}

// d(cost)/d(single-qubit probabilities), evaluated at the current stats.
inline Eigen::Vector2d single_weight(const CostSpec& spec, const CostStats& stats, int q) {
  Eigen::Vector2d w = Eigen::Vector2d::Zero();
  const Eigen::Vector2d& p = stats.singles.at(q);
  switch (spec.kind) {
    case CostKind::VnEntropy:
      for (int a = 0; a < 2; ++a) w[a] = entropy_weight(p[a]);
      break;
    case CostKind::CovarianceNorm: {
      const double expectation = p[0] - p[1];
      const double var = 1.0 - expectation * expectation;
      for (int a = 0; a < 2; ++a) {
        const double sign = a == 0 ? 1.0 : -1.0;
        w[a] = 4.0 * var * expectation * sign;
      }
      break;
    }
    default:
      break;
  }
  return w;
}

// d(cost)/d(pair probabilities). Outcome index b: bit 1 = left qubit i,
// bit 0 = right qubit j; bit 0 -> +1, bit 1 -> -1.
inline Eigen::Vector4d pair_weight(const CostSpec& spec, const CostStats& stats,
                                   const std::pair<int, int>& key) {
  const Eigen::Vector4d& f = stats.pairs.at(key);
  Eigen::Vector4d w = Eigen::Vector4d::Zero();
  switch (spec.kind) {
    case CostKind::MeasuredMIPair:
    case CostKind::ClassicalMINetwork: {
      const Eigen::Vector2d mi(f[0] + f[1], f[2] + f[3]);
      const Eigen::Vector2d mj(f[0] + f[2], f[1] + f[3]);
      for (int b = 0; b < 4; ++b) {
        const int ai = (b >> 1) & 1, aj = b & 1;
        // cost term H(f) - H(mi) - H(mj)
        w[b] = entropy_weight(f[b]) - entropy_weight(mi[ai]) - entropy_weight(mj[aj]);
      }
      break;
    }
    case CostKind::CovarianceNorm: {
      const double cov = covariance_of_pair_frequencies(f);
      const double ei = (f[0] + f[1]) - (f[2] + f[3]);
      const double ej = (f[0] + f[2]) - (f[1] + f[3]);
      for (int b = 0; b < 4; ++b) {
        const double si = (b & 2) ? -1.0 : 1.0;
        const double sj = (b & 1) ? -1.0 : 1.0;
        w[b] = -4.0 * cov * (si * sj - si * ej - sj * ei);
      }
      break;
    }
    default:
      break;
  }
  return w;
}

}  // namespace detail

inline double evaluate_cost(const PreparedState& state, const CostSpec& spec,
                            const MeasurementSettings& settings, std::uint64_t seed = 0) {
  const detail::CostStats stats = detail::gather_stats(state, spec, settings, seed);
  return detail::cost_from_stats(spec, stats);
}

/// Parameter-shift gradient with respect to the 3 angles of every active
/// qubit, flattened as [q0: t1 t2 t3, q1: t1 t2 t3, ...] in active_qubits
/// order. Exact in analytic mode; a fresh-sample estimate in shot mode.
inline Eigen::VectorXd parameter_shift_gradient(const PreparedState& state, const CostSpec& spec,
                                                const MeasurementSettings& settings,
                                                std::uint64_t seed = 0) {
  const std::vector<int> active = active_qubits(spec, state.num_qubits());
  const detail::CostStats at_theta = detail::gather_stats(state, spec, settings, derive_seed(seed, 0));

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(active.size()));
  for (std::size_t qi = 0; qi < active.size(); ++qi) {
    const int q = active[qi];
    const Eigen::Vector2d wq = detail::needs_singles(spec.kind)
                                   ? detail::single_weight(spec, at_theta, q)
                                   : Eigen::Vector2d::Zero();
    for (int axis = 0; axis < 3; ++axis) {
      MeasurementSettings plus = settings, minus = settings;
      plus.angles[static_cast<std::size_t>(q)][static_cast<std::size_t>(axis)] += M_PI / 2.0;
      minus.angles[static_cast<std::size_t>(q)][static_cast<std::size_t>(axis)] -= M_PI / 2.0;
      const std::uint64_t tag = static_cast<std::uint64_t>(qi) * 3 + static_cast<std::uint64_t>(axis);
      const detail::CostStats up = detail::gather_stats(state, spec, plus, derive_seed(seed, {1, tag, 0}), q);
      const detail::CostStats down =
          detail::gather_stats(state, spec, minus, derive_seed(seed, {1, tag, 1}), q);

      double g = 0.0;
      if (detail::needs_singles(spec.kind) && up.singles.count(q)) {
        const Eigen::Vector2d dp = (up.singles.at(q) - down.singles.at(q)) / 2.0;
        g += wq.dot(dp);
      }
      for (const auto& [key, fplus] : up.pairs) {
        const Eigen::Vector4d dp = (fplus - down.pairs.at(key)) / 2.0;
        g += detail::pair_weight(spec, at_theta, key).dot(dp);
      }
      grad[static_cast<Eigen::Index>(qi) * 3 + axis] = g;
    }
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Gradient descent with restarts.

struct OptimizerConfig {
  double step_size = 0.05;
  int steps = 30;
  int restarts = 10;
  std::optional<MeasurementSettings> init;  // explicit start; otherwise uniform random angles
  std::uint64_t seed = 0;
};

/// One descent run: costs[t] and settings[t] for t = 0..steps (entry 0 is
/// the initial point, entry `steps` the final one).
struct OptimizationTrace {
  std::vector<double> costs;
  std::vector<MeasurementSettings> settings;

  double final_cost() const { return costs.back(); }
  const MeasurementSettings& final_settings() const { return settings.back(); }
};

struct OptimizationResult {
  OptimizationTrace best;                  // restart with the lowest final cost
  double best_final_cost = 0.0;
  MeasurementSettings best_final_settings;
  double best_step_cost = 0.0;             // lowest cost at any recorded step of any restart
  MeasurementSettings best_step_settings;  // settings achieving it
  std::vector<double> restart_final_costs;
};

/// Minimizes the cost with `restarts` independent descent runs and returns
/// the best. Deterministic for a fixed seed: restart r draws its start from
/// derive_seed(seed, {0, r}) and every shot-mode evaluation inside step t
/// derives its own seed from (r, t). Divergence shows up in the trace, not
/// as an error.
inline OptimizationResult gradient_descent(const PreparedState& state, const CostSpec& spec,
                                           const OptimizerConfig& config) {
  require(config.step_size > 0.0, Errc::ParameterOutOfRange, "step size must be positive");
  require(config.steps >= 1 && config.restarts >= 1, Errc::ParameterOutOfRange,
          "steps and restarts must be at least 1");
  const std::vector<int> active = active_qubits(spec, state.num_qubits());

  OptimizationResult result;
  result.best_final_cost = std::numeric_limits<double>::infinity();
  result.best_step_cost = std::numeric_limits<double>::infinity();

  for (int r = 0; r < config.restarts; ++r) {
    const std::uint64_t restart_seed = derive_seed(config.seed, {0, static_cast<std::uint64_t>(r)});
    MeasurementSettings settings;
    if (config.init.has_value()) {
      settings = *config.init;
      require(settings.num_qubits() >= state.num_qubits(), Errc::SettingsMismatch,
              "explicit init does not cover the register");
    } else {
      settings = random_settings(state.num_qubits(), restart_seed);
    }

    OptimizationTrace trace;
    trace.costs.reserve(static_cast<std::size_t>(config.steps) + 1);
    trace.settings.reserve(static_cast<std::size_t>(config.steps) + 1);
    for (int t = 0; t < config.steps; ++t) {
      const std::uint64_t step_seed = derive_seed(restart_seed, {1, static_cast<std::uint64_t>(t)});
      trace.costs.push_back(evaluate_cost(state, spec, settings, derive_seed(step_seed, 0)));
      trace.settings.push_back(settings);
      const Eigen::VectorXd grad =
          parameter_shift_gradient(state, spec, settings, derive_seed(step_seed, 1));
      for (std::size_t qi = 0; qi < active.size(); ++qi)
        for (int axis = 0; axis < 3; ++axis)
          settings.angles[static_cast<std::size_t>(active[qi])][static_cast<std::size_t>(axis)] -=
              config.step_size * grad[static_cast<Eigen::Index>(qi) * 3 + axis];
    }
    trace.costs.push_back(evaluate_cost(
        state, spec, settings, derive_seed(restart_seed, {1, static_cast<std::uint64_t>(config.steps), 0})));
    trace.settings.push_back(settings);

    for (std::size_t t = 0; t < trace.costs.size(); ++t) {
      if (trace.costs[t] < result.best_step_cost) {
        result.best_step_cost = trace.costs[t];
        result.best_step_settings = trace.settings[t];
      }
    }
    result.restart_final_costs.push_back(trace.final_cost());
    if (trace.final_cost() < result.best_final_cost) {
      result.best_final_cost = trace.final_cost();
      result.best_final_settings = trace.final_settings();
      result.best = std::move(trace);
    }
  }
  return result;
}

/// Rounds of pairwise-disjoint qubit pairs covering every pair exactly
/// once (circle method). Lets per-pair optimizations that do not share a
/// qubit be evaluated in one circuit execution.
inline std::vector<std::vector<std::pair<int, int>>> pair_schedule(int num_qubits) {
  require(num_qubits >= 2, Errc::ParameterOutOfRange, "need at least two qubits");
  int n = num_qubits + (num_qubits % 2);  // add a bye slot when odd
  std::vector<int> ring(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ring[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<std::pair<int, int>>> rounds;
  for (int r = 0; r < n - 1; ++r) {
    std::vector<std::pair<int, int>> round;
    for (int k = 0; k < n / 2; ++k) {
      int a = ring[static_cast<std::size_t>(k)];
      int b = ring[static_cast<std::size_t>(n - 1 - k)];
      if (a >= num_qubits || b >= num_qubits) continue;  // bye
      round.emplace_back(std::min(a, b), std::max(a, b));
    }
    rounds.push_back(std::move(round));
    // rotate all but the first element
    std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
  }
  return rounds;
}

}  // namespace qni
