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

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "qni/commands.hpp"
#include "support.hpp"

using namespace qni;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qni_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

ExperimentConfig parse_config_text(const std::string& text) {
  return config_from_json(nlohmann::json::parse(text));
}

const std::string kBellConfig = R"({
  "schema": 1,
  "topology": {"qubits": 2, "sources": [[0, 1]], "nodes": [[0], [1]]},
  "preps": [{"kind": "bell"}],
  "method": "covariance",
  "optimizer": {"step_size": 0.05, "steps": 10, "restarts": 2},
  "seed": 5,
  "threshold": 0.05
})";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QNI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing validates fields", "[cli]") {
  CHECK_NOTHROW(parse_config_text(kBellConfig));

  auto expect_config_error = [](const std::string& text) {
    CHECK_THROWS_MATCHES(parse_config_text(text), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::ConfigError;
                         }));
  };
  expect_config_error(R"({"topology": {"qubits": 2, "sources": [[0,1]], "nodes": [[0],[1]]}})");
  expect_config_error(R"({"schema": 1})");
  expect_config_error(R"({"schema": 1, "topology": {"qubits": 2, "sources": [[0,7]], "nodes": [[0],[1]]}})");
  expect_config_error(R"({"schema": 1, "topology": {"qubits": 2, "sources": [[0,1]], "nodes": [[0],[1]]},
                          "channels": {"kind": "depolarizing", "gamma": 1.5}})");
  expect_config_error(R"({"schema": 1, "topology": {"qubits": 2, "sources": [[0,1]], "nodes": [[0],[1]]},
                          "shots": 0})");
  expect_config_error(R"({"schema": 1, "topology": {"qubits": 2, "sources": [[0,1]], "nodes": [[0],[1]]},
                          "method": "tarot"})");
}

TEST_CASE("topology can be supplied by file reference", "[cli]") {
  const fs::path dir = fresh_dir("topofile");
  write_text(dir / "topo.json", R"({"qubits": 2, "sources": [[0, 1]], "nodes": [[0], [1]]})");
  const ExperimentConfig config = parse_config_text(
      R"({"schema": 1, "topology": {"file": ")" + (dir / "topo.json").string() + R"("}})");
  CHECK(config.topology.num_qubits == 2);
  CHECK(config.topology.sources == std::vector<std::vector<int>>{{0, 1}});

  CHECK_THROWS_MATCHES(parse_config_text(R"({"schema": 1, "topology": {"file": "/no/such.json"}})"),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::ConfigError;
                       }));
}

TEST_CASE("gamma grid parsing", "[cli]") {
  const auto grid = parse_gamma_grid("0:0.9:0.1");
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == Catch::Approx(0.0));
  CHECK(grid.back() == Catch::Approx(0.9));
  CHECK_THROWS_AS(parse_gamma_grid("0.5:0.1:0.1"), Error);
  CHECK_THROWS_AS(parse_gamma_grid("nonsense"), Error);
}

TEST_CASE("matrix CSV and JSON round-trip exactly", "[cli]") {
  Rng rng(404);
  Eigen::MatrixXd entries(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = r; c < 3; ++c) entries(r, c) = entries(c, r) = rng.uniform(-1, 1) / 3.0;
  const CorrelationMatrix m = make_correlation_matrix(MatrixKind::Covariance, entries);

  const Eigen::MatrixXd csv_back = csv_to_matrix(matrix_to_csv(m));
  CHECK((csv_back - entries).cwiseAbs().maxCoeff() <= 1e-15);

  const CorrelationMatrix json_back = correlation_matrix_from_json(to_json(m));
  CHECK(json_back.kind == MatrixKind::Covariance);
  CHECK((json_back.entries - entries).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("simulate writes matrices and distributions", "[cli]") {
  const fs::path dir = fresh_dir("simulate");
  ExperimentConfig config = parse_config_text(kBellConfig);
  CHECK(cmd_simulate(config, dir) == kExitOk);
  CHECK(fs::exists(dir / "matrix.csv"));
  CHECK(fs::exists(dir / "matrix.json"));
  CHECK(fs::exists(dir / "distribution.csv"));

  // Bell pair in the default computational basis: unit covariance off the
  // diagonal, unit variance on it (maximally mixed marginals).
  const Eigen::MatrixXd m = csv_to_matrix(read_file(dir / "matrix.csv"));
  CHECK(m(0, 1) == Catch::Approx(1.0));
  CHECK(m(0, 0) == Catch::Approx(1.0));

  const std::string dist = read_file(dir / "distribution.csv");
  CHECK(dist.find("outcome,probability") == 0);
  REQUIRE(dist.find("\n00,") != std::string::npos);
  const std::size_t at = dist.find("\n00,") + 4;
  CHECK(std::stod(dist.substr(at, dist.find('\n', at) - at)) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("simulate shows unit covariance blocks for interleaved GHZ sources", "[cli]") {
  const fs::path dir = fresh_dir("simulate_ghz");
  ExperimentConfig config = parse_config_text(R"({
    "schema": 1,
    "topology": {"qubits": 6, "sources": [[0, 2, 4], [1, 3, 5]], "nodes": [[0, 1], [2, 3], [4, 5]]},
    "preps": [{"kind": "ghz"}, {"kind": "ghz"}],
    "method": "covariance"
  })");
  CHECK(cmd_simulate(config, dir) == kExitOk);
  const Eigen::MatrixXd m = csv_to_matrix(read_file(dir / "matrix.csv"));
  const std::vector<int> source_of = {0, 1, 0, 1, 0, 1};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const double want = source_of[static_cast<std::size_t>(i)] == source_of[static_cast<std::size_t>(j)]
                              ? 1.0
                              : 0.0;
      CHECK(m(i, j) == Catch::Approx(want).margin(1e-10));
    }
}

TEST_CASE("infer command produces a decoded topology and traces", "[cli]") {
  const fs::path dir = fresh_dir("infer");
  ExperimentConfig config = load_config(std::string(QNI_CONFIG_DIR) + "/w_phi_infer.json");
  config.optimizer.steps = 15;
  CHECK(cmd_infer(config, dir) == kExitOk);

  const auto result = nlohmann::json::parse(read_file(dir / "result.json"));
  CHECK(result.at("n_sources").get<int>() == 2);
  CHECK(result.at("sources").get<std::vector<std::vector<int>>>() ==
        std::vector<std::vector<int>>{{0, 1, 2}, {3, 4}});
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "inference_error.csv"));
  CHECK(fs::exists(dir / "matrix_stepwise_best.csv"));

  const std::string trace = read_file(dir / "trace.csv");
  CHECK(trace.find("optimization,step,cost") == 0);
  CHECK(trace.find("covariance-norm,0,") != std::string::npos);
}

TEST_CASE("infer reruns are byte-identical under a fixed seed", "[cli]") {
  ExperimentConfig config = parse_config_text(kBellConfig);
  config.shots.shots = 250;
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  CHECK(cmd_infer(config, a) == kExitOk);
  CHECK(cmd_infer(config, b) == kExitOk);
  for (const char* name : {"result.json", "matrix.csv", "matrix.json", "trace.csv"})
    CHECK(read_file(a / name) == read_file(b / name));

  // A different seed changes the empirical outputs.
  config.optimizer.seed = 6;
  const fs::path c = fresh_dir("det_c");
  CHECK(cmd_infer(config, c) == kExitOk);
  CHECK(read_file(a / "trace.csv") != read_file(c / "trace.csv"));
}

TEST_CASE("sweep-noise writes the full curve table", "[cli]") {
  const fs::path dir = fresh_dir("sweep");
  ExperimentConfig config = load_config(std::string(QNI_CONFIG_DIR) + "/bell_sweep_depolarizing.json");
  config.gamma_grid = {0.0, 0.5};
  config.trials = 3;
  config.optimizer.steps = 10;
  CHECK(cmd_sweep_noise(config, dir) == kExitOk);
  const std::string csv = read_file(dir / "sweep.csv");
  CHECK(csv.find("gamma,mi_theory,mi_best,mi_mean,mi_stderr,cov_theory,cov_best,cov_mean,cov_stderr") == 0);
  // gamma = 0.5 depolarizing: covariance theory column is (1 - 0.5)^2.
  CHECK(csv.find("0.5,") != std::string::npos);
  CHECK(csv.find(",0.25,") != std::string::npos);
}

TEST_CASE("simulate on the zero state writes zero off-diagonals", "[cli]") {
  const fs::path dir = fresh_dir("simulate_zero");
  ExperimentConfig config = load_config(std::string(QNI_CONFIG_DIR) + "/zero5_shared.json");
  config.method = InferMethod::Covariance;
  config.shots.shots.reset();  // analytic
  CHECK(cmd_simulate(config, dir) == kExitOk);
  const Eigen::MatrixXd m = csv_to_matrix(read_file(dir / "matrix.csv"));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) CHECK(std::abs(m(i, j)) < 1e-12);
}

TEST_CASE("amplitude-damping sweep reports 1 - gamma as covariance theory", "[cli]") {
  const fs::path dir = fresh_dir("sweep_ad");
  ExperimentConfig config = load_config(std::string(QNI_CONFIG_DIR) + "/bell_sweep_ampdamp.json");
  config.gamma_grid = {0.5};
  config.trials = 2;
  config.optimizer.steps = 5;
  CHECK(cmd_sweep_noise(config, dir) == kExitOk);
  const std::string csv = read_file(dir / "sweep.csv");
  const std::size_t row = csv.find('\n') + 1;
  std::istringstream cells(csv.substr(row, csv.find('\n', row) - row));
  std::vector<std::string> fields;
  std::string cell;
  while (std::getline(cells, cell, ',')) fields.push_back(cell);
  REQUIRE(fields.size() == 9);
  CHECK(std::stod(fields[0]) == Catch::Approx(0.5));
  CHECK(std::stod(fields[5]) == Catch::Approx(0.5));  // cov_theory = 1 - gamma
  CHECK(std::stod(fields[1]) ==
        Catch::Approx(0.75 * std::log2(1.5) + 0.25 * std::log2(0.5)).margin(1e-12));
}

TEST_CASE("compare command prints witnesses and distinguishes triangles", "[cli]") {
  using namespace qni::testing;
  const fs::path dir = fresh_dir("compare");
  const CorrelationMatrix m1 = expected_characteristic_matrix(triangle_network_1());
  const CorrelationMatrix m2 = expected_characteristic_matrix(triangle_network_2());
  atomic_write(dir / "m1.json", to_json(m1).dump() + "\n");
  atomic_write(dir / "m2.json", to_json(m2).dump() + "\n");
  atomic_write(dir / "m1.csv", matrix_to_csv(m1));

  CHECK(cmd_compare(dir / "m1.json", dir / "m1.csv", 1e-9) == kExitOk);
  CHECK(cmd_compare(dir / "m1.json", dir / "m2.json", 1e-9) == kExitDifferent);
  CHECK_THROWS_AS(cmd_compare(dir / "missing.json", dir / "m1.json", 1e-9), Error);
}

TEST_CASE("binary end-to-end: exit codes and outputs", "[cli][binary]") {
  const fs::path dir = fresh_dir("binary");
  write_text(dir / "bell.json", kBellConfig);

  CHECK(run_cli("simulate --config " + (dir / "bell.json").string() + " --out " +
                (dir / "sim").string()) == kExitOk);
  CHECK(fs::exists(dir / "sim" / "matrix.csv"));

  CHECK(run_cli("infer --config " + (dir / "bell.json").string() + " --out " +
                (dir / "inf").string() + " --shots 100 --seed 9") == kExitOk);
  CHECK(fs::exists(dir / "inf" / "result.json"));

  // Malformed config: exit 2.
  write_text(dir / "broken.json", "{\"schema\": 1, \"topology\": {\"qubits\": 2");
  CHECK(run_cli("simulate --config " + (dir / "broken.json").string()) == kExitConfig);

  // Malformed qubit id: exit 2.
  write_text(dir / "badqubit.json",
             R"({"schema":1,"topology":{"qubits":2,"sources":[[0,9]],"nodes":[[0],[1]]}})");
  CHECK(run_cli("simulate --config " + (dir / "badqubit.json").string()) == kExitConfig);

  // Unknown flag: exit 2.
  CHECK(run_cli("simulate --config " + (dir / "bell.json").string() + " --frobnicate") == kExitConfig);

  // Compare: equivalent-to-self exit 0, different exit 1.
  using namespace qni::testing;
  atomic_write(dir / "m1.json", to_json(expected_characteristic_matrix(triangle_network_1())).dump());
  atomic_write(dir / "m2.json", to_json(expected_characteristic_matrix(triangle_network_2())).dump());
  CHECK(run_cli("compare " + (dir / "m1.json").string() + " " + (dir / "m1.json").string()) == kExitOk);
  CHECK(run_cli("compare " + (dir / "m1.json").string() + " " + (dir / "m2.json").string()) ==
        kExitDifferent);
}
