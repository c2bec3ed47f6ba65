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
#include <numeric>
#include <string>
#include <vector>

#include "qni/correlation_matrix.hpp"
#include "qni/error.hpp"

namespace qni {

using QubitId = int;

/// A two-layer network: sources distribute qubits to measurement nodes.
///
/// The topology is stored as two partitions of [0, num_qubits): the qubit
/// sets prepared by each source and the qubit sets received by each node.
/// Every qubit travels over exactly one source->node link, so links are
/// implied by membership and never stored.
///
/// Immutable after construction; all operations in this header are pure.
struct NetworkTopology {
  int num_qubits = 0;
  std::vector<std::vector<QubitId>> sources;  // each sorted ascending
  std::vector<std::vector<QubitId>> nodes;    // each sorted ascending

  int num_sources() const { return static_cast<int>(sources.size()); }
  int num_nodes() const { return static_cast<int>(nodes.size()); }
};

/// Per-node source counts and the pairwise shared-source matrix.
/// shared_sources(i, i) == per_node_sources[i] by construction.
struct GroundTruthCounts {
  std::vector<int> per_node_sources;
  Eigen::MatrixXi shared_sources;
};

/// Result of an isomorphism query; carries the reason when negative.
struct TopologyMatch {
  bool same = false;
  std::string reason;

  explicit operator bool() const { return same; }
};

namespace detail {

inline void check_partition(int num_qubits, const std::vector<std::vector<QubitId>>& parts,
                            const std::string& label) {
  require(!parts.empty(), Errc::EmptyPart, "topology has no " + label + "s");
  std::vector<int> owner(static_cast<std::size_t>(num_qubits), -1);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    require(!parts[p].empty(), Errc::EmptyPart, label + " " + std::to_string(p) + " is empty");
    for (QubitId q : parts[p]) {
      require(q >= 0 && q < num_qubits, Errc::QubitIndexOutOfRange,
              "qubit " + std::to_string(q) + " out of range in " + label + " " + std::to_string(p));
      require(owner[static_cast<std::size_t>(q)] < 0, Errc::QubitMultiplyAssigned,
              "qubit " + std::to_string(q) + " appears in more than one " + label);
      owner[static_cast<std::size_t>(q)] = static_cast<int>(p);
    }
  }
  for (int q = 0; q < num_qubits; ++q) {
    require(owner[static_cast<std::size_t>(q)] >= 0, Errc::QubitUnassigned,
            "qubit " + std::to_string(q) + " belongs to no " + label);
  }
}

inline std::vector<int> owner_map(int num_qubits, const std::vector<std::vector<QubitId>>& parts) {
  std::vector<int> owner(static_cast<std::size_t>(num_qubits), -1);
  for (std::size_t p = 0; p < parts.size(); ++p)
    for (QubitId q : parts[p]) owner[static_cast<std::size_t>(q)] = static_cast<int>(p);
  return owner;
}

}  // namespace detail

/// Throws unless the source and node lists are both partitions of
/// [0, num_qubits) with no empty parts. Sending several qubits of one
/// source to the same node is allowed here; only the GHZ-mode expected
/// matrix requires one qubit per (source, node) pair.
inline void validate(const NetworkTopology& t) {
  require(t.num_qubits >= 1, Errc::EmptyPart, "topology has no qubits");
  detail::check_partition(t.num_qubits, t.sources, "source");
  detail::check_partition(t.num_qubits, t.nodes, "node");
}

/// Builds a topology with parts sorted ascending, then validates it.
inline NetworkTopology make_topology(int num_qubits, std::vector<std::vector<QubitId>> sources,
                                     std::vector<std::vector<QubitId>> nodes) {
  for (auto& s : sources) std::sort(s.begin(), s.end());
  for (auto& n : nodes) std::sort(n.begin(), n.end());
  NetworkTopology t{num_qubits, std::move(sources), std::move(nodes)};
  validate(t);
  return t;
}

/// qubit -> source index.
inline std::vector<int> source_of_qubit(const NetworkTopology& t) {
  return detail::owner_map(t.num_qubits, t.sources);
}

/// qubit -> node index.
inline std::vector<int> node_of_qubit(const NetworkTopology& t) {
  return detail::owner_map(t.num_qubits, t.nodes);
}

/// T(i, j) = number of qubits source i sends to node j. The multiset of
/// links, in matrix form; topology comparisons reduce to comparing these
/// up to independent row/column permutations.
inline Eigen::MatrixXi link_count_matrix(const NetworkTopology& t) {
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(t.num_sources(), t.num_nodes());
  const std::vector<int> node_of = node_of_qubit(t);
  for (int s = 0; s < t.num_sources(); ++s)
    for (QubitId q : t.sources[static_cast<std::size_t>(s)])
      counts(s, node_of[static_cast<std::size_t>(q)]) += 1;
  return counts;
}

/// True when no source sends two or more qubits to one node.
inline bool satisfies_one_qubit_per_node(const NetworkTopology& t) {
  return (link_count_matrix(t).array() <= 1).all();
}

inline GroundTruthCounts ground_truth_counts(const NetworkTopology& t) {
  validate(t);
  const Eigen::MatrixXi links = link_count_matrix(t);
  const int nm = t.num_nodes();
  GroundTruthCounts counts;
  counts.per_node_sources.resize(static_cast<std::size_t>(nm), 0);
  counts.shared_sources = Eigen::MatrixXi::Zero(nm, nm);
  for (int i = 0; i < nm; ++i)
    for (int j = 0; j < nm; ++j)
      for (int s = 0; s < t.num_sources(); ++s)
        if (links(s, i) > 0 && links(s, j) > 0) counts.shared_sources(i, j) += 1;
  for (int i = 0; i < nm; ++i)
    counts.per_node_sources[static_cast<std::size_t>(i)] = counts.shared_sources(i, i);
  return counts;
}

namespace detail {

// Sorted column entries, used to restrict which node relabelings are
// worth trying during the isomorphism search.
inline std::vector<int> column_signature(const Eigen::MatrixXi& m, int col) {
  std::vector<int> sig(static_cast<std::size_t>(m.rows()));
  for (int r = 0; r < m.rows(); ++r) sig[static_cast<std::size_t>(r)] = m(r, col);
  std::sort(sig.begin(), sig.end());
  return sig;
}

inline std::vector<std::vector<int>> sorted_rows(const Eigen::MatrixXi& m) {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(m.rows()));
  for (int r = 0; r < m.rows(); ++r) {
    rows[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(m.cols()));
    for (int c = 0; c < m.cols(); ++c) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

// Backtracks over column (node) assignments; a full assignment matches
// when the row multisets agree, which absorbs the source relabeling.
inline bool column_permutation_exists(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b,
                                      std::vector<int>& a_col_for_b, std::vector<bool>& used, int col) {
  const int nm = static_cast<int>(a.cols());
  if (col == nm) {
    Eigen::MatrixXi permuted(a.rows(), nm);
    for (int j = 0; j < nm; ++j) permuted.col(j) = a.col(a_col_for_b[static_cast<std::size_t>(j)]);
    return sorted_rows(permuted) == sorted_rows(b);
  }
  const std::vector<int> want = column_signature(b, col);
  for (int cand = 0; cand < nm; ++cand) {
    if (used[static_cast<std::size_t>(cand)]) continue;
    if (column_signature(a, cand) != want) continue;
    used[static_cast<std::size_t>(cand)] = true;
    a_col_for_b[static_cast<std::size_t>(col)] = cand;
    if (column_permutation_exists(a, b, a_col_for_b, used, col + 1)) return true;
    used[static_cast<std::size_t>(cand)] = false;
  }
  return false;
}

}  // namespace detail

/// Exact topology equivalence: do separate source and node relabelings
/// exist mapping one link multiset onto the other? Size mismatches are
/// reported as non-equivalence rather than thrown, since comparing
/// networks of different shape is a well-posed question with answer "no".
inline TopologyMatch same_topology(const NetworkTopology& a, const NetworkTopology& b) {
  validate(a);
  validate(b);
  if (a.num_qubits != b.num_qubits) return {false, "SizeMismatch: qubit counts differ"};
  if (a.num_sources() != b.num_sources()) return {false, "SizeMismatch: source counts differ"};
  if (a.num_nodes() != b.num_nodes()) return {false, "SizeMismatch: node counts differ"};

  const Eigen::MatrixXi la = link_count_matrix(a);
  const Eigen::MatrixXi lb = link_count_matrix(b);
  std::vector<int> assign(static_cast<std::size_t>(a.num_nodes()), -1);
  std::vector<bool> used(static_cast<std::size_t>(a.num_nodes()), false);
  if (detail::column_permutation_exists(la, lb, assign, used, 0)) return {true, ""};
  return {false, "link structures are not related by any relabeling"};
}

/// Noiseless GHZ-mode ground truth for node-level inference: entropies on
/// the diagonal, shared-source counts off it. Sources of a single qubit
/// prepare pure states and contribute nothing to the diagonal.
inline CorrelationMatrix expected_characteristic_matrix(const NetworkTopology& t) {
  validate(t);
  require(satisfies_one_qubit_per_node(t), Errc::AssumptionViolated,
          "a source sends more than one qubit to a single node");
  const Eigen::MatrixXi links = link_count_matrix(t);
  const int nm = t.num_nodes();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nm, nm);
  for (int s = 0; s < t.num_sources(); ++s) {
    const bool entangled = t.sources[static_cast<std::size_t>(s)].size() >= 2;
    for (int i = 0; i < nm; ++i) {
      if (links(s, i) == 0) continue;
      if (entangled) m(i, i) += 1.0;
      for (int j = 0; j < nm; ++j)
        if (j != i && links(s, j) > 0) m(i, j) += 1.0;
    }
  }
  return make_correlation_matrix(MatrixKind::Characteristic, std::move(m));
}

}  // namespace qni
