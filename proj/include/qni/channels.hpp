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
#include <cmath>
#include <vector>

#include "qni/density.hpp"
#include "qni/error.hpp"

namespace qni {

inline Eigen::Matrix2cd pauli_i() { return Eigen::Matrix2cd::Identity(); }
inline Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}
inline Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}
inline Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

/// CPTP map in operator-sum form: rho -> sum_i K_i rho K_i^dagger.
struct KrausChannel {
  std::vector<Eigen::MatrixXcd> ops;

  int num_qubits() const {
    int n = 0;
    while ((Eigen::Index{1} << n) < ops.front().rows()) ++n;
    return n;
  }
};

/// Throws unless sum_i K_i^dagger K_i = I within tol.
inline void check_complete(const KrausChannel& channel, double tol = kPhysicalTol) {
  require(!channel.ops.empty(), Errc::IncompleteKrausSet, "channel has no Kraus operators");
  const Eigen::Index d = channel.ops.front().rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& k : channel.ops) {
    require(k.rows() == d && k.cols() == d, Errc::DimensionMismatch,
            "Kraus operators have mixed dimensions");
    sum += k.adjoint() * k;
  }
  require((sum - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() <= tol,
          Errc::IncompleteKrausSet, "Kraus completeness relation violated");
}

inline KrausChannel identity_channel(int num_qubits = 1) {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  return KrausChannel{{Eigen::MatrixXcd::Identity(d, d)}};
}

/// Depolarizing channel on num_qubits qubits:
///   rho -> (1 - gamma) rho + gamma I / 2^n,
/// realized by Pauli-string Kraus operators with weight sqrt(1 - gamma +
/// gamma/4^n) on the identity string and sqrt(gamma/4^n) elsewhere. For a
/// single qubit this reduces to the familiar {I, X, Y, Z} set with weights
/// sqrt(1 - 3 gamma / 4) and sqrt(gamma / 4).
inline KrausChannel depolarizing_channel(double gamma, int num_qubits = 1) {
  require(gamma >= 0.0 && gamma <= 1.0, Errc::ParameterOutOfRange,
          "depolarizing strength must be in [0, 1]");
  require(num_qubits >= 1, Errc::ParameterOutOfRange, "channel needs at least one qubit");
  const std::array<Eigen::Matrix2cd, 4> paulis = {pauli_i(), pauli_x(), pauli_y(), pauli_z()};
  long strings = 1;
  for (int k = 0; k < num_qubits; ++k) strings *= 4;
  const double uniform_weight = gamma / static_cast<double>(strings);

  KrausChannel channel;
  for (long s = 0; s < strings; ++s) {
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(1, 1);
    long code = s;
    for (int q = 0; q < num_qubits; ++q) {
      const Eigen::Matrix2cd& p = paulis[static_cast<std::size_t>(code % 4)];
      code /= 4;
      Eigen::MatrixXcd next(op.rows() * 2, op.cols() * 2);
      for (Eigen::Index r = 0; r < op.rows(); ++r)
        for (Eigen::Index c = 0; c < op.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = op(r, c) * p;
      op = std::move(next);
    }
    const double w = (s == 0) ? 1.0 - gamma + uniform_weight : uniform_weight;
    if (w <= 0.0) continue;
    channel.ops.push_back(std::sqrt(w) * op);
  }
  check_complete(channel);
  return channel;
}

/// Single-qubit amplitude damping: decay toward |0> with strength gamma.
inline KrausChannel amplitude_damping_channel(double gamma) {
  require(gamma >= 0.0 && gamma <= 1.0, Errc::ParameterOutOfRange,
          "damping strength must be in [0, 1]");
  Eigen::Matrix2cd k0, k1;
  k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  k1 << 0, std::sqrt(gamma), 0, 0;
  KrausChannel channel{{k0, k1}};
  check_complete(channel);
  return channel;
}

/// Applies a channel to the listed qubits of a larger register.
inline DensityMatrix apply_channel_on_qubits(const DensityMatrix& state, const KrausChannel& channel,
                                             const std::vector<int>& qubits) {
  check_complete(channel);
  require(channel.num_qubits() == static_cast<int>(qubits.size()), Errc::DimensionMismatch,
          "channel arity does not match qubit list");
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(state.dim(), state.dim());
  for (const auto& k : channel.ops) acc += apply_operator_on_qubits(state, k, qubits).mat;
  return DensityMatrix{state.num_qubits, std::move(acc)};
}

/// Independent per-link noise: channels[q] is a single-qubit channel
/// applied to qubit q. Use identity_channel() for noiseless links.
inline DensityMatrix apply_link_channels(const DensityMatrix& state,
                                         const std::vector<KrausChannel>& channels) {
  require(static_cast<int>(channels.size()) == state.num_qubits, Errc::DimensionMismatch,
          "need one channel per qubit");
  DensityMatrix out = state;
  for (int q = 0; q < state.num_qubits; ++q) {
    require(channels[static_cast<std::size_t>(q)].num_qubits() == 1, Errc::DimensionMismatch,
            "link channels must be single-qubit");
    out = apply_channel_on_qubits(out, channels[static_cast<std::size_t>(q)], {q});
  }
  return out;
}

}  // namespace qni
