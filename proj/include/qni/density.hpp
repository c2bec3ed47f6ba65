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
#include <algorithm>
#include <complex>
#include <vector>

#include "qni/error.hpp"

namespace qni {

using Complex = std::complex<double>;

// Basis convention: a computational basis index b of an n-qubit register
// encodes qubit q in bit (n-1-q), i.e. kets read left to right starting
// with qubit 0: |q0 q1 ... q_{n-1}>. All operations below preserve this
// ordering, and any reordering is explicit.

inline constexpr double kPhysicalTol = 1e-10;

inline int bit_of(Eigen::Index index, int qubit, int num_qubits) {
  return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1);
}

/// Dense density operator on num_qubits qubits. Treated as immutable:
/// every operation returns a fresh value.
struct DensityMatrix {
  int num_qubits = 0;
  Eigen::MatrixXcd mat;

  Eigen::Index dim() const { return mat.rows(); }
};

inline DensityMatrix density_from_pure(const Eigen::VectorXcd& amplitudes) {
  const Eigen::Index d = amplitudes.size();
  require(d > 0 && (d & (d - 1)) == 0, Errc::DimensionMismatch,
          "amplitude vector length must be a power of two");
  require(std::abs(amplitudes.squaredNorm() - 1.0) <= kPhysicalTol, Errc::NonPhysicalState,
          "amplitude vector is not normalized");
  int n = 0;
  while ((Eigen::Index{1} << n) < d) ++n;
  return DensityMatrix{n, amplitudes * amplitudes.adjoint()};
}

inline DensityMatrix density_from_matrix(int num_qubits, Eigen::MatrixXcd m) {
  require(m.rows() == m.cols() && m.rows() == (Eigen::Index{1} << num_qubits),
          Errc::DimensionMismatch, "density matrix dimension does not match qubit count");
  return DensityMatrix{num_qubits, std::move(m)};
}

/// Hermiticity, unit trace and positivity within tolerance. The eigenvalue
/// check costs a full decomposition, so call sites that only need cheap
/// checks pass check_spectrum = false.
inline void check_physical(const DensityMatrix& state, double tol = kPhysicalTol,
                           bool check_spectrum = true) {
  require((state.mat - state.mat.adjoint()).cwiseAbs().maxCoeff() <= tol, Errc::NonPhysicalState,
          "state is not Hermitian");
  require(std::abs(state.mat.trace().real() - 1.0) <= tol && std::abs(state.mat.trace().imag()) <= tol,
          Errc::NonPhysicalState, "state trace is not 1");
  if (check_spectrum) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(state.mat, Eigen::EigenvaluesOnly);
    require(solver.eigenvalues().minCoeff() >= -tol, Errc::NonPhysicalState,
            "state has a negative eigenvalue");
  }
}

namespace detail {

inline void check_qubit_list(const DensityMatrix& state, const std::vector<int>& qubits) {
  for (int q : qubits)
    require(q >= 0 && q < state.num_qubits, Errc::QubitIndexOutOfRange,
            "qubit " + std::to_string(q) + " out of range");
  std::vector<int> sorted = qubits;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          Errc::QubitIndexOutOfRange, "duplicate qubit in list");
}

// Index of the full-register basis state built by placing the bits of
// `sub` at `positions` (in order) and the bits of `rest` at the remaining
// positions (ascending).
inline Eigen::Index compose_index(Eigen::Index sub, Eigen::Index rest, const std::vector<int>& positions,
                                  const std::vector<int>& rest_positions, int num_qubits) {
  Eigen::Index out = 0;
  const int m = static_cast<int>(positions.size());
  for (int k = 0; k < m; ++k)
    if ((sub >> (m - 1 - k)) & 1) out |= Eigen::Index{1} << (num_qubits - 1 - positions[static_cast<std::size_t>(k)]);
  const int r = static_cast<int>(rest_positions.size());
  for (int k = 0; k < r; ++k)
    if ((rest >> (r - 1 - k)) & 1)
      out |= Eigen::Index{1} << (num_qubits - 1 - rest_positions[static_cast<std::size_t>(k)]);
  return out;
}

inline std::vector<int> complement(int num_qubits, const std::vector<int>& qubits) {
  std::vector<bool> in(static_cast<std::size_t>(num_qubits), false);
  for (int q : qubits) in[static_cast<std::size_t>(q)] = true;
  std::vector<int> rest;
  for (int q = 0; q < num_qubits; ++q)
    if (!in[static_cast<std::size_t>(q)]) rest.push_back(q);
  return rest;
}

}  // namespace detail

/// Reduced state on `keep` (returned in ascending qubit order, reindexed
/// from 0). Trace-preserving.
inline DensityMatrix partial_trace(const DensityMatrix& state, std::vector<int> keep) {
  require(!keep.empty(), Errc::QubitIndexOutOfRange, "partial trace must keep at least one qubit");
  detail::check_qubit_list(state, keep);
  std::sort(keep.begin(), keep.end());
  const std::vector<int> traced = detail::complement(state.num_qubits, keep);
  const int m = static_cast<int>(keep.size());
  const Eigen::Index dk = Eigen::Index{1} << m;
  const Eigen::Index dt = Eigen::Index{1} << traced.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r)
    for (Eigen::Index c = 0; c < dk; ++c) {
      Complex sum = 0.0;
      for (Eigen::Index t = 0; t < dt; ++t)
        sum += state.mat(detail::compose_index(r, t, keep, traced, state.num_qubits),
                         detail::compose_index(c, t, keep, traced, state.num_qubits));
      out(r, c) = sum;
    }
  return DensityMatrix{m, std::move(out)};
}

/// Reorders tensor factors: `layout[k]` names the qubit currently sitting
/// at position k; the result holds qubit q at position q.
inline DensityMatrix relayout_to_ascending(const DensityMatrix& state, const std::vector<int>& layout) {
  require(static_cast<int>(layout.size()) == state.num_qubits, Errc::DimensionMismatch,
          "layout size does not match qubit count");
  detail::check_qubit_list(state, layout);
  const int n = state.num_qubits;
  const Eigen::Index d = state.dim();
  std::vector<Eigen::Index> map(static_cast<std::size_t>(d));
  for (Eigen::Index b = 0; b < d; ++b) {
    Eigen::Index out = 0;
    for (int k = 0; k < n; ++k)
      if ((b >> (n - 1 - k)) & 1) out |= Eigen::Index{1} << (n - 1 - layout[static_cast<std::size_t>(k)]);
    map[static_cast<std::size_t>(b)] = out;
  }
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      out(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]) = state.mat(r, c);
  return DensityMatrix{n, std::move(out)};
}

/// rho -> (A on `qubits`) rho (A on `qubits`)^dagger, with A a 2^m x 2^m
/// operator acting on the listed qubits (in list order) and identity
/// elsewhere. Cost O(2^m * 4^n) instead of lifting A to the full space.
inline DensityMatrix apply_operator_on_qubits(const DensityMatrix& state, const Eigen::MatrixXcd& op,
                                              const std::vector<int>& qubits) {
  const int m = static_cast<int>(qubits.size());
  require(op.rows() == op.cols() && op.rows() == (Eigen::Index{1} << m), Errc::DimensionMismatch,
          "operator dimension does not match qubit list");
  detail::check_qubit_list(state, qubits);
  const std::vector<int> rest = detail::complement(state.num_qubits, qubits);
  const Eigen::Index dm = Eigen::Index{1} << m;
  const Eigen::Index dr = Eigen::Index{1} << rest.size();
  const Eigen::Index d = state.dim();

  std::vector<Eigen::Index> offsets(static_cast<std::size_t>(dm * dr));
  for (Eigen::Index s = 0; s < dm; ++s)
    for (Eigen::Index t = 0; t < dr; ++t)
      offsets[static_cast<std::size_t>(s * dr + t)] =
          detail::compose_index(s, t, qubits, rest, state.num_qubits);

  // T = A rho
  Eigen::MatrixXcd tmp = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index s = 0; s < dm; ++s)
    for (Eigen::Index t = 0; t < dr; ++t) {
      const Eigen::Index row = offsets[static_cast<std::size_t>(s * dr + t)];
      for (Eigen::Index s2 = 0; s2 < dm; ++s2) {
        const Complex a = op(s, s2);
        if (a == Complex{0.0, 0.0}) continue;
        tmp.row(row) += a * state.mat.row(offsets[static_cast<std::size_t>(s2 * dr + t)]);
      }
    }
  // out = T A^dagger
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index s = 0; s < dm; ++s)
    for (Eigen::Index t = 0; t < dr; ++t) {
      const Eigen::Index col = offsets[static_cast<std::size_t>(s * dr + t)];
      for (Eigen::Index s2 = 0; s2 < dm; ++s2) {
        const Complex a = std::conj(op(s, s2));
        if (a == Complex{0.0, 0.0}) continue;
        out.col(col) += a * tmp.col(offsets[static_cast<std::size_t>(s2 * dr + t)]);
      }
    }
  return DensityMatrix{state.num_qubits, std::move(out)};
}

/// Tensor product of two density operators (lhs qubits first).
inline DensityMatrix tensor(const DensityMatrix& lhs, const DensityMatrix& rhs) {
  const Eigen::Index dl = lhs.dim(), dr = rhs.dim();
  Eigen::MatrixXcd out(dl * dr, dl * dr);
  for (Eigen::Index r = 0; r < dl; ++r)
    for (Eigen::Index c = 0; c < dl; ++c)
      out.block(r * dr, c * dr, dr, dr) = lhs.mat(r, c) * rhs.mat;
  return DensityMatrix{lhs.num_qubits + rhs.num_qubits, std::move(out)};
}

}  // namespace qni
