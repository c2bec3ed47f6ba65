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
#include <string>

#include "qni/error.hpp"

namespace qni {

/// What a correlation matrix stores.
///   Characteristic: Shannon/von Neumann entropies on the diagonal,
///                   measured mutual information off the diagonal.
///   Covariance:     variances on the diagonal, |covariance| off it.
///   Binary:         thresholded 0/1 entries.
enum class MatrixKind { Characteristic, Covariance, Binary };

inline const char* matrix_kind_name(MatrixKind k) {
  switch (k) {
    case MatrixKind::Characteristic: return "characteristic";
    case MatrixKind::Covariance: return "covariance";
    case MatrixKind::Binary: return "binary";
  }
  return "unknown";
}

inline MatrixKind matrix_kind_from_name(const std::string& name) {
  if (name == "characteristic") return MatrixKind::Characteristic;
  if (name == "covariance") return MatrixKind::Covariance;
  if (name == "binary") return MatrixKind::Binary;
  raise(Errc::ConfigError, "unknown matrix kind '" + name + "'");
}

/// Symmetric N x N matrix of correlation statistics over qubits or nodes.
struct CorrelationMatrix {
  MatrixKind kind = MatrixKind::Characteristic;
  Eigen::MatrixXd entries;

  int size() const { return static_cast<int>(entries.rows()); }
};

inline CorrelationMatrix make_correlation_matrix(MatrixKind kind, Eigen::MatrixXd entries) {
  require(entries.rows() == entries.cols(), Errc::SizeMismatch, "correlation matrix must be square");
  return CorrelationMatrix{kind, std::move(entries)};
}

}  // namespace qni
