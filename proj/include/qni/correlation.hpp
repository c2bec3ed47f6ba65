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
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qni/correlation_matrix.hpp"
#include "qni/density.hpp"
#include "qni/error.hpp"
#include "qni/measure.hpp"
#include "qni/rng.hpp"

namespace qni {

// All entropies are in bits (log base 2), with 0 log 0 = 0.

inline constexpr double kEigClamp = 1e-12;

inline double entropy_of_frequencies(const Eigen::VectorXd& f) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (f[i] > 0.0) h -= f[i] * std::log2(f[i]);
  return h;
}

inline double shannon_entropy(const OutcomeDistribution& dist) {
  require(dist.num_bits > 0, Errc::EmptyDistribution, "distribution over no outcomes");
  if (dist.mode == OutcomeDistribution::Mode::Empirical)
    require(dist.shots > 0, Errc::EmptyDistribution, "empirical distribution with no shots");
  return entropy_of_frequencies(dist.frequencies());
}

/// S(rho) = -tr(rho log2 rho), the Shannon entropy of the spectrum.
/// Eigenvalues below kEigClamp are treated as exact zeros. This is the
/// oracle that variational Shannon-entropy minimization is checked against.
inline double von_neumann_entropy_exact(const DensityMatrix& state) {
  check_physical(state, kPhysicalTol, false);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(state.mat, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()[i];
    require(lambda >= -kPhysicalTol, Errc::NonPhysicalState, "state has a negative eigenvalue");
    if (lambda > kEigClamp) h -= lambda * std::log2(lambda);
  }
  return h;
}

namespace detail {

inline Eigen::VectorXd marginal_frequencies(const Eigen::VectorXd& joint, int num_bits,
                                            const std::vector<int>& keep_bits) {
  const int m = static_cast<int>(keep_bits.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index{1} << m);
  for (Eigen::Index b = 0; b < joint.size(); ++b) {
    Eigen::Index sub = 0;
    for (int k = 0; k < m; ++k)
      if (bit_of(b, keep_bits[static_cast<std::size_t>(k)], num_bits))
        sub |= Eigen::Index{1} << (m - 1 - k);
    out[sub] += joint[b];
  }
  return out;
}

}  // namespace detail

/// I(A; B) = H(A) + H(B) - H(A, B) over a bipartition of the measured
/// bits; group_a lists bit positions of the first group, the complement is
/// the second. Plug-in estimate for empirical distributions (may be
/// slightly negative; reported as-is).
inline double mutual_information(const OutcomeDistribution& joint, const std::vector<int>& group_a) {
  require(joint.num_bits >= 2, Errc::BadPartition, "mutual information needs at least two bits");
  std::vector<bool> in_a(static_cast<std::size_t>(joint.num_bits), false);
  for (int b : group_a) {
    require(b >= 0 && b < joint.num_bits, Errc::BadPartition, "split index out of range");
    require(!in_a[static_cast<std::size_t>(b)], Errc::BadPartition, "split index repeated");
    in_a[static_cast<std::size_t>(b)] = true;
  }
  std::vector<int> group_b;
  for (int b = 0; b < joint.num_bits; ++b)
    if (!in_a[static_cast<std::size_t>(b)]) group_b.push_back(b);
  require(!group_a.empty() && !group_b.empty(), Errc::BadPartition,
          "both sides of the split must be non-empty");

  const Eigen::VectorXd f = joint.frequencies();
  return entropy_of_frequencies(detail::marginal_frequencies(f, joint.num_bits, group_a)) +
         entropy_of_frequencies(detail::marginal_frequencies(f, joint.num_bits, group_b)) -
         entropy_of_frequencies(f);
}

/// Covariance of two +-1-valued qubit outcomes (bit 0 -> +1, bit 1 -> -1).
/// Signed; callers take the absolute value at matrix-assembly time.
inline double covariance(const OutcomeDistribution& joint) {
  require(joint.num_bits == 2, Errc::BadArity, "covariance is defined for exactly two qubits");
  const Eigen::VectorXd f = joint.frequencies();
  double exy = 0.0, ex = 0.0, ey = 0.0;
  for (int b = 0; b < 4; ++b) {
    const double sx = (b & 2) ? -1.0 : 1.0;
    const double sy = (b & 1) ? -1.0 : 1.0;
    exy += sx * sy * f[b];
    ex += sx * f[b];
    ey += sy * f[b];
  }
  return exy - ex * ey;
}

inline double variance_from_qubit_frequencies(const Eigen::VectorXd& f) {
  const double ex = f[0] - f[1];
  return 1.0 - ex * ex;
}

/// Threshold entry-wise: 1 iff value > tau, strictly, diagonal included.
inline CorrelationMatrix binarize(const CorrelationMatrix& matrix, double tau) {
  require(tau >= 0.0 && std::isfinite(tau), Errc::ParameterOutOfRange,
          "threshold must be finite and nonnegative");
  Eigen::MatrixXd b = (matrix.entries.array() > tau).cast<double>();
  return make_correlation_matrix(MatrixKind::Binary, std::move(b));
}

/// Rule-of-thumb threshold z standard errors above the shot noise floor.
inline double threshold_from_zscore(double z, std::int64_t shots) {
  require(shots >= 1, Errc::ParameterOutOfRange, "need at least one shot");
  return z * std::sqrt(1.0 / static_cast<double>(shots));
}

/// Frobenius distance d(A, B) = sqrt(tr[(B - A)^T (B - A)]).
inline double inference_error(const CorrelationMatrix& observed, const CorrelationMatrix& ideal) {
  require(observed.size() == ideal.size(), Errc::SizeMismatch, "matrix sizes differ");
  require(observed.kind == ideal.kind, Errc::SizeMismatch, "matrix kinds differ");
  return (ideal.entries - observed.entries).norm();
}

// ---------------------------------------------------------------------------
// Qubit-matrix assembly.

struct ShotConfig {
  std::optional<std::int64_t> shots;  // nullopt = analytic

  bool analytic() const { return !shots.has_value(); }
};

namespace detail {

inline Eigen::Vector2d qubit_frequencies(const PreparedState& state, int q,
                                         const std::array<double, 3>& angles, const ShotConfig& shots,
                                         std::uint64_t seed) {
  const Eigen::Vector2d p = state.qubit_distribution(q, angles);
  if (shots.analytic()) return p;
  const auto sampled = sample_outcomes(analytic_distribution(1, p), *shots.shots, seed);
  return sampled.frequencies();
}

inline Eigen::Vector4d pair_frequencies(const PreparedState& state, int i, int j,
                                        const std::array<double, 3>& angles_i,
                                        const std::array<double, 3>& angles_j, const ShotConfig& shots,
                                        std::uint64_t seed) {
  const Eigen::Vector4d p = state.pair_distribution(i, j, angles_i, angles_j);
  if (shots.analytic()) return p;
  const auto sampled = sample_outcomes(analytic_distribution(2, p), *shots.shots, seed);
  return sampled.frequencies();
}

inline double covariance_of_pair_frequencies(const Eigen::Vector4d& f) {
  OutcomeDistribution d;
  d.mode = OutcomeDistribution::Mode::Analytic;
  d.num_bits = 2;
  d.probs = f;
  return covariance(d);
}

inline double mi_of_pair_frequencies(const Eigen::Vector4d& f) {
  const Eigen::Vector2d mi(f[0] + f[1], f[2] + f[3]);
  const Eigen::Vector2d mj(f[0] + f[2], f[1] + f[3]);
  return entropy_of_frequencies(mi) + entropy_of_frequencies(mj) - entropy_of_frequencies(f);
}

}  // namespace detail

/// Assembles the qubit matrix with every qubit measured in one shared
/// basis. In finite-shot mode a single sample of the whole register is
/// drawn and every entry is estimated from its marginal counts, the way
/// one run of the experiment would be post-processed.
///   Characteristic: H(a_q) on the diagonal, plug-in I(a_i; a_j) off it.
///   Covariance:     Var(q) on the diagonal, |cov| off it.
inline CorrelationMatrix assemble_qubit_matrix_shared(const PreparedState& state,
                                                      const MeasurementSettings& settings,
                                                      MatrixKind kind, const ShotConfig& shots = {},
                                                      std::uint64_t seed = 0) {
  require(kind != MatrixKind::Binary, Errc::SettingsMismatch, "assemble a real-valued kind");
  const int n = state.num_qubits();
  require(settings.num_qubits() >= n, Errc::SettingsMismatch, "settings do not cover the register");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);

  Eigen::VectorXd joint;
  if (!shots.analytic()) {
    const OutcomeDistribution full = state.joint_distribution(settings);
    joint = sample_outcomes(full, *shots.shots, seed).frequencies();
  }

  for (int q = 0; q < n; ++q) {
    Eigen::Vector2d f;
    if (shots.analytic()) {
      f = state.qubit_distribution(q, settings.angles[static_cast<std::size_t>(q)]);
    } else {
      const Eigen::VectorXd marg = detail::marginal_frequencies(joint, n, {q});
      f = Eigen::Vector2d(marg[0], marg[1]);
    }
    m(q, q) = (kind == MatrixKind::Characteristic) ? entropy_of_frequencies(f)
                                                   : variance_from_qubit_frequencies(f);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::Vector4d f;
      if (shots.analytic()) {
        f = state.pair_distribution(i, j, settings.angles[static_cast<std::size_t>(i)],
                                    settings.angles[static_cast<std::size_t>(j)]);
      } else {
        const Eigen::VectorXd marg = detail::marginal_frequencies(joint, n, {i, j});
        f = Eigen::Vector4d(marg[0], marg[1], marg[2], marg[3]);
      }
      const double value = (kind == MatrixKind::Characteristic)
                               ? detail::mi_of_pair_frequencies(f)
                               : std::abs(detail::covariance_of_pair_frequencies(f));
      m(i, j) = m(j, i) = value;
    }
  return make_correlation_matrix(kind, std::move(m));
}

/// Per-pair settings: an independent basis per qubit (diagonal entries)
/// and per ordered pair i < j (off-diagonal entries).
struct PerPairSettings {
  std::vector<std::array<double, 3>> diagonal;
  std::map<std::pair<int, int>, std::pair<std::array<double, 3>, std::array<double, 3>>> pairs;
};

/// Assembles the qubit matrix with dedicated measurements per entry; each
/// entry's estimate comes from its own circuit (and, in finite-shot mode,
/// its own sample with a seed derived from `seed` and the entry index).
inline CorrelationMatrix assemble_qubit_matrix_per_pair(const PreparedState& state,
                                                        const PerPairSettings& settings,
                                                        MatrixKind kind, const ShotConfig& shots = {},
                                                        std::uint64_t seed = 0) {
  require(kind != MatrixKind::Binary, Errc::SettingsMismatch, "assemble a real-valued kind");
  const int n = state.num_qubits();
  require(static_cast<int>(settings.diagonal.size()) == n, Errc::SettingsMismatch,
          "need one diagonal basis per qubit");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int q = 0; q < n; ++q) {
    const Eigen::Vector2d f = detail::qubit_frequencies(
        state, q, settings.diagonal[static_cast<std::size_t>(q)], shots,
        derive_seed(seed, {0, static_cast<std::uint64_t>(q)}));
    m(q, q) = (kind == MatrixKind::Characteristic) ? entropy_of_frequencies(f)
                                                   : variance_from_qubit_frequencies(f);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto it = settings.pairs.find({i, j});
      require(it != settings.pairs.end(), Errc::SettingsMismatch,
              "missing settings for pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      const Eigen::Vector4d f = detail::pair_frequencies(
          state, i, j, it->second.first, it->second.second, shots,
          derive_seed(seed, {1, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)}));
      const double value = (kind == MatrixKind::Characteristic)
                               ? detail::mi_of_pair_frequencies(f)
                               : std::abs(detail::covariance_of_pair_frequencies(f));
      m(i, j) = m(j, i) = value;
    }
  return make_correlation_matrix(kind, std::move(m));
}

// ---------------------------------------------------------------------------
// Closed-form noise curves for a Bell pair, used as theory references.

namespace theory {

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

/// Computational-basis mutual information of a Bell pair after per-qubit
/// depolarizing of strength gamma:
///   (1 + u)/2 log2(1 + u) + (1 - u)/2 log2(1 - u),  u = (1 - gamma)^2.
inline double depolarized_bell_mi(double gamma) {
  const double u = (1.0 - gamma) * (1.0 - gamma);
  return (xlog2x(1.0 + u) + xlog2x(1.0 - u)) / 2.0;
}

/// Computational-basis covariance of the same state: (1 - gamma)^2.
inline double depolarized_bell_covariance(double gamma) { return (1.0 - gamma) * (1.0 - gamma); }

/// sigma_x-basis mutual information of a Bell pair after per-qubit
/// amplitude damping.
inline double amplitude_damped_bell_mi(double gamma) {
  return (2.0 - gamma) / 2.0 * std::log2(2.0 - gamma) + (gamma > 0.0 ? gamma / 2.0 * std::log2(gamma) : 0.0);
}

/// sigma_x-basis covariance of the same state: 1 - gamma.
inline double amplitude_damped_bell_covariance(double gamma) { return 1.0 - gamma; }

/// Mutual information of one shared pair (Bell or classical bit) whose
/// source suffered joint depolarizing of strength gamma; the per-pair
/// building block of the noisy node-level analysis.
inline double source_depolarized_pair_mi(double gamma) {
  return (2.0 - gamma) / 2.0 * std::log2(2.0 - gamma) + (gamma > 0.0 ? gamma / 2.0 * std::log2(gamma) : 0.0);
}

}  // namespace theory

}  // namespace qni
