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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qni/correlation_matrix.hpp"
#include "qni/error.hpp"
#include "qni/infer.hpp"
#include "qni/topology.hpp"
#include "qni/varopt.hpp"

namespace qni {

// Numbers are written with 17 significant digits, enough for exact
// double round-trips, so rerunning a seeded experiment reproduces output
// files byte for byte.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes via a temporary file and rename, so readers never observe a
/// half-written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::ConfigError, "cannot open " + tmp.string() + " for writing");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::ConfigError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// CSV.

inline std::string matrix_to_csv(const CorrelationMatrix& m) {
  std::string out;
  for (int r = 0; r < m.size(); ++r) {
    for (int c = 0; c < m.size(); ++c) {
      if (c > 0) out += ',';
      out += format_double(m.entries(r, c));
    }
    out += '\n';
  }
  return out;
}

inline Eigen::MatrixXd csv_to_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        require(used == cell.size(), Errc::ConfigError, "bad number '" + cell + "'");
      } catch (const std::exception&) {
        raise(Errc::ConfigError, "bad number '" + cell + "' in CSV");
      }
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), Errc::ConfigError, "empty CSV matrix");
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    require(r.size() == cols, Errc::ConfigError, "ragged CSV matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

// ---------------------------------------------------------------------------
// JSON.

inline nlohmann::json to_json(const CorrelationMatrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (int r = 0; r < m.size(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.size(); ++c) row.push_back(m.entries(r, c));
    entries.push_back(std::move(row));
  }
  return {{"kind", matrix_kind_name(m.kind)}, {"size", m.size()}, {"entries", std::move(entries)}};
}

inline CorrelationMatrix correlation_matrix_from_json(const nlohmann::json& j) {
  require(j.contains("kind") && j.contains("entries"), Errc::ConfigError,
          "matrix JSON needs 'kind' and 'entries'");
  const auto& entries = j.at("entries");
  require(entries.is_array() && !entries.empty(), Errc::ConfigError, "matrix entries must be rows");
  const int n = static_cast<int>(entries.size());
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    require(entries.at(static_cast<std::size_t>(r)).size() == static_cast<std::size_t>(n),
            Errc::ConfigError, "matrix must be square");
    for (int c = 0; c < n; ++c) m(r, c) = entries.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
  }
  if (j.contains("size"))
    require(j.at("size").get<int>() == n, Errc::ConfigError, "matrix size field disagrees with entries");
  return make_correlation_matrix(matrix_kind_from_name(j.at("kind").get<std::string>()), std::move(m));
}

inline nlohmann::json to_json(const NetworkTopology& t) {
  return {{"qubits", t.num_qubits}, {"sources", t.sources}, {"nodes", t.nodes}};
}

inline NetworkTopology topology_from_json(const nlohmann::json& j) {
  require(j.contains("qubits") && j.contains("sources") && j.contains("nodes"), Errc::ConfigError,
          "topology JSON needs 'qubits', 'sources' and 'nodes'");
  try {
    return make_topology(j.at("qubits").get<int>(),
                         j.at("sources").get<std::vector<std::vector<int>>>(),
                         j.at("nodes").get<std::vector<std::vector<int>>>());
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::ConfigError, std::string("bad topology: ") + e.what());
  }
}

inline nlohmann::json to_json(const InferenceResult& r) {
  return {{"threshold", r.threshold},
          {"n_sources", r.n_sources},
          {"sources", r.topology.sources},
          {"nodes", r.topology.nodes},
          {"binary_matrix", to_json(r.binary)}};
}

inline nlohmann::json to_json(const OptimizationTrace& trace) {
  nlohmann::json settings = nlohmann::json::array();
  for (const auto& s : trace.settings) settings.push_back(s.angles);
  return {{"steps", trace.costs.size() - 1}, {"costs", trace.costs}, {"settings", std::move(settings)}};
}

/// Loads a correlation matrix from .json (kind-aware) or .csv (entries
/// only; kind defaults to characteristic).
inline CorrelationMatrix load_matrix_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") {
    try {
      return correlation_matrix_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      raise(Errc::ConfigError, path.string() + ": " + e.what());
    }
  }
  Eigen::MatrixXd entries = csv_to_matrix(text);
  require(entries.rows() == entries.cols(), Errc::ConfigError, "matrix file must be square");
  return make_correlation_matrix(MatrixKind::Characteristic, std::move(entries));
}

}  // namespace qni
