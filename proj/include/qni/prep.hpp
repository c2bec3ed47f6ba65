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
#include <vector>

#include "qni/density.hpp"
#include "qni/error.hpp"
#include "qni/measure.hpp"
#include "qni/topology.hpp"

namespace qni {

/// What a source emits. Local rotations, when present, are applied
/// per qubit after preparation; they model senders whose Bloch-sphere
/// frames are misaligned with the receivers'.
struct StatePrep {
  enum class Kind { GHZ, W, Bell, Zero, ExplicitPure, ExplicitMixed };

  Kind kind = Kind::GHZ;
  int num_qubits = 0;
  Eigen::VectorXcd amplitudes;                    // ExplicitPure only
  Eigen::MatrixXcd mixed;                         // ExplicitMixed only
  std::vector<std::array<double, 3>> rotations;   // empty, or one triple per qubit
};

inline StatePrep ghz_prep(int n) {
  require(n >= 1, Errc::ParameterOutOfRange, "GHZ needs at least one qubit");
  return StatePrep{StatePrep::Kind::GHZ, n, {}, {}, {}};
}

inline StatePrep w_prep(int n) {
  require(n >= 2, Errc::ParameterOutOfRange, "W state needs at least two qubits");
  return StatePrep{StatePrep::Kind::W, n, {}, {}, {}};
}

inline StatePrep bell_prep() { return StatePrep{StatePrep::Kind::Bell, 2, {}, {}, {}}; }

inline StatePrep zero_prep(int n) {
  require(n >= 1, Errc::ParameterOutOfRange, "zero state needs at least one qubit");
  return StatePrep{StatePrep::Kind::Zero, n, {}, {}, {}};
}

inline StatePrep pure_prep(Eigen::VectorXcd amplitudes) {
  const Eigen::Index d = amplitudes.size();
  require(d > 0 && (d & (d - 1)) == 0, Errc::DimensionMismatch,
          "amplitude vector length must be a power of two");
  require(std::abs(amplitudes.squaredNorm() - 1.0) <= kPhysicalTol, Errc::NonPhysicalState,
          "amplitude vector is not normalized");
  int n = 0;
  while ((Eigen::Index{1} << n) < d) ++n;
  return StatePrep{StatePrep::Kind::ExplicitPure, n, std::move(amplitudes), {}, {}};
}

inline StatePrep mixed_prep(int num_qubits, Eigen::MatrixXcd rho) {
  DensityMatrix dm = density_from_matrix(num_qubits, std::move(rho));
  check_physical(dm);
  return StatePrep{StatePrep::Kind::ExplicitMixed, num_qubits, {}, std::move(dm.mat), {}};
}

inline StatePrep with_rotations(StatePrep prep, std::vector<std::array<double, 3>> rotations) {
  require(static_cast<int>(rotations.size()) == prep.num_qubits, Errc::DimensionMismatch,
          "need one rotation triple per prepared qubit");
  prep.rotations = std::move(rotations);
  return prep;
}

/// The source state on its own qubits (position k = k-th qubit of the
/// source in ascending id order once embedded in a network).
inline DensityMatrix prepare_state(const StatePrep& prep) {
  const int n = prep.num_qubits;
  const Eigen::Index d = Eigen::Index{1} << n;
  DensityMatrix state;
  switch (prep.kind) {
    case StatePrep::Kind::GHZ:
    case StatePrep::Kind::Bell: {
      Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(d);
      amps[0] = amps[d - 1] = 1.0 / std::sqrt(2.0);
      state = density_from_pure(amps);
      break;
    }
    case StatePrep::Kind::W: {
      Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(d);
      for (int q = 0; q < n; ++q) amps[Eigen::Index{1} << (n - 1 - q)] = 1.0 / std::sqrt(n);
      state = density_from_pure(amps);
      break;
    }
    case StatePrep::Kind::Zero: {
      Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(d);
      amps[0] = 1.0;
      state = density_from_pure(amps);
      break;
    }
    case StatePrep::Kind::ExplicitPure:
      state = density_from_pure(prep.amplitudes);
      break;
    case StatePrep::Kind::ExplicitMixed:
      state = density_from_matrix(n, prep.mixed);
      break;
  }
  if (!prep.rotations.empty()) {
    require(static_cast<int>(prep.rotations.size()) == n, Errc::DimensionMismatch,
            "need one rotation triple per prepared qubit");
    for (int q = 0; q < n; ++q)
      state = apply_operator_on_qubits(state, qubit_unitary(prep.rotations[static_cast<std::size_t>(q)]), {q});
  }
  return state;
}

/// Joint state of the whole network in global qubit order. Each source's
/// preparation covers its qubits in ascending id order; the tensor factors
/// are assembled source by source and then permuted into qubit-id order.
inline DensityMatrix prepare_network_state(const NetworkTopology& topology,
                                           const std::vector<StatePrep>& preps) {
  validate(topology);
  require(preps.size() == topology.sources.size(), Errc::DimensionMismatch,
          "need one preparation per source");
  DensityMatrix joint;
  std::vector<int> layout;  // layout[k] = global qubit id at tensor slot k
  for (std::size_t s = 0; s < preps.size(); ++s) {
    const auto& qubits = topology.sources[s];
    require(preps[s].num_qubits == static_cast<int>(qubits.size()), Errc::DimensionMismatch,
            "preparation arity does not match source " + std::to_string(s));
    DensityMatrix part = prepare_state(preps[s]);
    joint = (s == 0) ? std::move(part) : tensor(joint, part);
    layout.insert(layout.end(), qubits.begin(), qubits.end());
  }
  return relayout_to_ascending(joint, layout);
}

}  // namespace qni
