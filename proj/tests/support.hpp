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

// Test-only oracles and generators. Everything here is deliberately
// brute-force and independent of the library code paths it checks.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include "qni/rng.hpp"
#include "qni/topology.hpp"

namespace qni::testing {

// ---------------------------------------------------------------------------
// Brute-force topology isomorphism: enumerate every pair of source/node
// bijections and compare link multisets directly. Exponential; keep sizes
// at or below 5.
inline bool brute_force_isomorphic(const NetworkTopology& a, const NetworkTopology& b) {
  if (a.num_qubits != b.num_qubits || a.num_sources() != b.num_sources() ||
      a.num_nodes() != b.num_nodes())
    return false;
  const Eigen::MatrixXi la = link_count_matrix(a);
  const Eigen::MatrixXi lb = link_count_matrix(b);
  std::vector<int> sperm(static_cast<std::size_t>(a.num_sources()));
  std::iota(sperm.begin(), sperm.end(), 0);
  do {
    std::vector<int> nperm(static_cast<std::size_t>(a.num_nodes()));
    std::iota(nperm.begin(), nperm.end(), 0);
    do {
      bool ok = true;
      for (int i = 0; ok && i < la.rows(); ++i)
        for (int j = 0; ok && j < la.cols(); ++j)
          if (la(sperm[static_cast<std::size_t>(i)], nperm[static_cast<std::size_t>(j)]) != lb(i, j))
            ok = false;
      if (ok) return true;
    } while (std::next_permutation(nperm.begin(), nperm.end()));
  } while (std::next_permutation(sperm.begin(), sperm.end()));
  return false;
}

// Random partition of [0, n) into parts, each of size >= min_part.
inline std::vector<std::vector<int>> random_partition(Rng& rng, int n, int min_part) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(ids[static_cast<std::size_t>(i)], ids[rng.below(static_cast<std::uint64_t>(i + 1))]);
  std::vector<std::vector<int>> parts;
  std::size_t at = 0;
  while (at < ids.size()) {
    const int remaining = static_cast<int>(ids.size() - at);
    int take = min_part + static_cast<int>(rng.below(3));
    if (remaining - take < min_part) take = remaining;
    parts.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(at),
                       ids.begin() + static_cast<std::ptrdiff_t>(at) + take);
    at += static_cast<std::size_t>(take);
  }
  return parts;
}

// Random valid topology. min_source_size = 2 keeps every source genuinely
// entangling (GHZ/W preparable).
inline NetworkTopology random_topology(Rng& rng, int num_qubits, int min_source_size = 1) {
  return make_topology(num_qubits, random_partition(rng, num_qubits, min_source_size),
                       random_partition(rng, num_qubits, 1));
}

// Random topology with every source of size >= 2 and at most one qubit of
// each source per node (GHZ-mode assumptions). Rejection sampling.
inline NetworkTopology random_assumption1_topology(Rng& rng, int num_qubits, int max_nodes = 4) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    auto sources = random_partition(rng, num_qubits, 2);
    auto nodes = random_partition(rng, num_qubits, 1);
    if (static_cast<int>(nodes.size()) > max_nodes) continue;
    NetworkTopology t = make_topology(num_qubits, std::move(sources), std::move(nodes));
    if (satisfies_one_qubit_per_node(t)) return t;
  }
  // Fall back to a line network that always satisfies the assumptions.
  std::vector<std::vector<int>> sources, nodes;
  for (int q = 0; q + 1 < num_qubits; q += 2) sources.push_back({q, q + 1});
  if (num_qubits % 2 == 1) sources.back().push_back(num_qubits - 1);
  for (int q = 0; q < num_qubits; ++q) nodes.push_back({q});
  return make_topology(num_qubits, std::move(sources), std::move(nodes));
}

// Central finite differences, the oracle for parameter-shift gradients.
inline Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                                  const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd hi = x, lo = x;
    hi[k] += h;
    lo[k] -= h;
    g[k] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// Triangle network 1: three two-qubit sources on a cycle of three nodes.
inline NetworkTopology triangle_network_1() {
  return make_topology(6, {{0, 1}, {2, 3}, {4, 5}}, {{0, 2}, {1, 4}, {3, 5}});
}

// Triangle network 2: two three-qubit sources, one qubit of each per node.
inline NetworkTopology triangle_network_2() {
  return make_topology(6, {{0, 2, 4}, {1, 3, 5}}, {{0, 1}, {2, 3}, {4, 5}});
}

}  // namespace qni::testing
