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
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "qni/density.hpp"
#include "qni/error.hpp"
#include "qni/rng.hpp"

namespace qni {

// ---------------------------------------------------------------------------
// Parameterized local measurements.
//
// A qubit measurement is the projective pair {U^dagger |a><a| U} with
//   U(t1, t2, t3) = Rz(t3) Ry(t2) Rz(t1),   R_a(t) = exp(+i t sigma_a / 2),
// so outcome probabilities are the diagonal of U rho U^dagger. Every
// rotation generator has eigenvalue gap 1, which is what makes the +-pi/2
// parameter-shift rule exact for these probabilities. Global and
// per-outcome phases are irrelevant to projective statistics; at
// (0, pi/2, 0) the measured observable U^dagger sigma_z U is exactly
// sigma_x (outcome 0 projects on |+>).

inline Eigen::Matrix2cd rotation_y(double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Eigen::Matrix2cd m;
  m << c, s, -s, c;
  return m;
}

inline Eigen::Matrix2cd rotation_z(double theta) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(Complex(0, theta / 2.0));
  m(1, 1) = std::exp(Complex(0, -theta / 2.0));
  return m;
}

inline Eigen::Matrix2cd qubit_unitary(const std::array<double, 3>& angles) {
  for (double a : angles)
    require(std::isfinite(a), Errc::ParameterOutOfRange, "measurement angle is not finite");
  return rotation_z(angles[2]) * rotation_y(angles[1]) * rotation_z(angles[0]);
}

/// ZYZ angles whose qubit_unitary() equals u up to a global phase.
inline std::array<double, 3> euler_angles_of(const Eigen::Matrix2cd& u) {
  require((u * u.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= 1e-9,
          Errc::ParameterOutOfRange, "matrix is not unitary");
  // Strip global phase so that det = 1, leaving [[a, b], [-conj(b), conj(a)]].
  const Complex det = u.determinant();
  const Eigen::Matrix2cd su = u * std::exp(Complex(0, -std::arg(det) / 2.0));
  const Complex a = su(0, 0), b = su(0, 1);
  const double theta2 = 2.0 * std::atan2(std::abs(b), std::abs(a));
  double phase_sum = 0.0, phase_diff = 0.0;  // (t3 + t1)/2 and (t3 - t1)/2
  if (std::abs(a) > 1e-12) phase_sum = std::arg(a);
  if (std::abs(b) > 1e-12) phase_diff = std::arg(b);
  return {phase_sum - phase_diff, theta2, phase_sum + phase_diff};
}

/// Angles measuring the sigma_z (computational) basis.
inline std::array<double, 3> computational_basis_angles() { return {0.0, 0.0, 0.0}; }

/// Angles measuring the sigma_x basis (outcome 0 = |+>).
inline std::array<double, 3> sigma_x_basis_angles() { return {0.0, M_PI / 2.0, 0.0}; }

/// One rotation triple per qubit of the register. Angles are radians,
/// interpreted mod 2pi.
struct MeasurementSettings {
  std::vector<std::array<double, 3>> angles;

  int num_qubits() const { return static_cast<int>(angles.size()); }
};

inline MeasurementSettings uniform_settings(int num_qubits, const std::array<double, 3>& a) {
  return MeasurementSettings{std::vector<std::array<double, 3>>(static_cast<std::size_t>(num_qubits), a)};
}

inline MeasurementSettings random_settings(int num_qubits, std::uint64_t seed) {
  Rng rng(seed);
  MeasurementSettings s;
  s.angles.resize(static_cast<std::size_t>(num_qubits));
  for (auto& a : s.angles)
    for (double& v : a) v = rng.uniform(0.0, 2.0 * M_PI);
  return s;
}

// ---------------------------------------------------------------------------
// Outcome statistics.

/// Distribution over bitstrings of the measured qubits: exact Born
/// probabilities, or integer counts from a seeded finite-shot run.
struct OutcomeDistribution {
  enum class Mode { Analytic, Empirical };

  Mode mode = Mode::Analytic;
  int num_bits = 0;
  Eigen::VectorXd probs;              // Analytic
  std::vector<std::int64_t> counts;   // Empirical
  std::int64_t shots = 0;
  std::uint64_t seed = 0;

  Eigen::Index num_outcomes() const { return Eigen::Index{1} << num_bits; }

  /// Probabilities (analytic) or normalized counts (empirical).
  Eigen::VectorXd frequencies() const {
    if (mode == Mode::Analytic) return probs;
    Eigen::VectorXd f(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i)
      f[static_cast<Eigen::Index>(i)] =
          static_cast<double>(counts[i]) / static_cast<double>(shots);
    return f;
  }
};

inline OutcomeDistribution analytic_distribution(int num_bits, Eigen::VectorXd probs) {
  require(probs.size() == (Eigen::Index{1} << num_bits), Errc::DimensionMismatch,
          "probability vector length does not match bit count");
  require(probs.minCoeff() >= -kPhysicalTol, Errc::NonPhysicalState, "negative probability");
  require(std::abs(probs.sum() - 1.0) <= kPhysicalTol, Errc::NonPhysicalState,
          "probabilities do not sum to 1");
  OutcomeDistribution d;
  d.mode = OutcomeDistribution::Mode::Analytic;
  d.num_bits = num_bits;
  d.probs = std::move(probs);
  return d;
}

/// Born-rule outcome distribution for measuring `measured_qubits` (bit k of
/// the outcome index = listed qubit k, leftmost first). Unmeasured qubits
/// are traced out first. settings.angles[q] supplies qubit q's basis.
inline OutcomeDistribution measurement_probabilities(const DensityMatrix& state,
                                                     const MeasurementSettings& settings,
                                                     const std::vector<int>& measured_qubits) {
  require(!measured_qubits.empty(), Errc::QubitIndexOutOfRange, "no qubits to measure");
  detail::check_qubit_list(state, measured_qubits);
  require(settings.num_qubits() >= state.num_qubits, Errc::SettingsMismatch,
          "settings do not cover the register");

  std::vector<int> sorted = measured_qubits;
  std::sort(sorted.begin(), sorted.end());
  DensityMatrix reduced = (static_cast<int>(sorted.size()) == state.num_qubits)
                              ? state
                              : partial_trace(state, sorted);
  for (std::size_t k = 0; k < sorted.size(); ++k)
    reduced = apply_operator_on_qubits(
        reduced, qubit_unitary(settings.angles[static_cast<std::size_t>(sorted[k])]),
        {static_cast<int>(k)});

  const int m = static_cast<int>(sorted.size());
  const Eigen::Index d = Eigen::Index{1} << m;
  // Map outcome bits from ascending-qubit order to the caller's list order.
  std::vector<int> pos_in_sorted(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), measured_qubits[static_cast<std::size_t>(k)]);
    pos_in_sorted[static_cast<std::size_t>(k)] = static_cast<int>(it - sorted.begin());
  }
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(d);
  for (Eigen::Index b = 0; b < d; ++b) {
    Eigen::Index out = 0;
    for (int k = 0; k < m; ++k)
      if (bit_of(b, pos_in_sorted[static_cast<std::size_t>(k)], m)) out |= Eigen::Index{1} << (m - 1 - k);
    probs[out] = std::max(reduced.mat(b, b).real(), 0.0);
  }
  return analytic_distribution(m, std::move(probs));
}

/// Multinomial sample of an analytic distribution: `shots` inverse-CDF
/// draws using 53-bit uniforms from mt19937_64 seeded with `seed`.
/// Bit-reproducible across platforms.
inline OutcomeDistribution sample_outcomes(const OutcomeDistribution& dist, std::int64_t shots,
                                           std::uint64_t seed) {
  require(dist.mode == OutcomeDistribution::Mode::Analytic, Errc::BadArity,
          "can only sample an analytic distribution");
  require(shots >= 1, Errc::ParameterOutOfRange, "need at least one shot");
  const Eigen::Index n = dist.probs.size();
  std::vector<double> cumulative(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += std::max(dist.probs[i], 0.0);
    cumulative[static_cast<std::size_t>(i)] = acc;
  }
  OutcomeDistribution out;
  out.mode = OutcomeDistribution::Mode::Empirical;
  out.num_bits = dist.num_bits;
  out.counts.assign(static_cast<std::size_t>(n), 0);
  out.shots = shots;
  out.seed = seed;
  Rng rng(seed);
  for (std::int64_t s = 0; s < shots; ++s) {
    const double u = rng.next_double() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), static_cast<std::size_t>(n - 1));
    out.counts[idx] += 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cached marginals.

/// A network state plus its one- and two-qubit reduced density matrices.
/// Correlation quantities only touch pair marginals, so cost evaluations
/// against a PreparedState avoid rotating the full register. Immutable.
class PreparedState {
 public:
  explicit PreparedState(DensityMatrix state) : state_(std::move(state)) {
    const int n = state_.num_qubits;
    singles_.reserve(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) singles_.push_back(partial_trace(state_, {q}).mat);
    pairs_.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        pairs_[pair_index(i, j)] = partial_trace(state_, {i, j}).mat;
  }

  const DensityMatrix& full() const { return state_; }
  int num_qubits() const { return state_.num_qubits; }

  const Eigen::MatrixXcd& single(int q) const { return singles_.at(static_cast<std::size_t>(q)); }

  /// Reduced state of qubits {i, j}, i < j, qubit i = left tensor factor.
  const Eigen::MatrixXcd& pair(int i, int j) const {
    require(i < j, Errc::QubitIndexOutOfRange, "pair indices must be ordered");
    return pairs_.at(pair_index(i, j));
  }

  /// P(outcome of qubit q) under the given basis.
  Eigen::Vector2d qubit_distribution(int q, const std::array<double, 3>& angles) const {
    const Eigen::Matrix2cd u = qubit_unitary(angles);
    const Eigen::Matrix2cd rotated = u * single(q) * u.adjoint();
    return {std::max(rotated(0, 0).real(), 0.0), std::max(rotated(1, 1).real(), 0.0)};
  }

  /// Joint P(a_i, a_j) under per-qubit bases; bit 0 of the outcome index is
  /// qubit j (rightmost), bit 1 is qubit i.
  Eigen::Vector4d pair_distribution(int i, int j, const std::array<double, 3>& angles_i,
                                    const std::array<double, 3>& angles_j) const {
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
    const Eigen::Matrix2cd ui = qubit_unitary(angles_i), uj = qubit_unitary(angles_j);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) u.block(2 * r, 2 * c, 2, 2) = ui(r, c) * uj;
    const Eigen::Matrix4cd rotated = u * pair(i, j) * u.adjoint();
    Eigen::Vector4d p;
    for (int b = 0; b < 4; ++b) p[b] = std::max(rotated(b, b).real(), 0.0);
    return p;
  }

  /// Full-register outcome distribution under per-qubit bases.
  OutcomeDistribution joint_distribution(const MeasurementSettings& settings) const {
    std::vector<int> all(static_cast<std::size_t>(num_qubits()));
    for (int q = 0; q < num_qubits(); ++q) all[static_cast<std::size_t>(q)] = q;
    return measurement_probabilities(state_, settings, all);
  }

 private:
  std::size_t pair_index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(state_.num_qubits) +
           static_cast<std::size_t>(j);
  }

  DensityMatrix state_;
  std::vector<Eigen::MatrixXcd> singles_;
  std::vector<Eigen::MatrixXcd> pairs_;
};

}  // namespace qni
