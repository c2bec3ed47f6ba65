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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qni/error.hpp"
#include "qni/infer.hpp"
#include "qni/serialize.hpp"

namespace qni {

// Experiment configs are versioned JSON documents (schema: 1); every knob
// of a run lives in the file so results are reproducible and diffable.
// Command-line flags override individual fields after loading.

struct ChannelSpec {
  enum class Kind { None, Depolarizing, AmplitudeDamping };
  Kind kind = Kind::None;
  double gamma = 0.0;
};

struct PrepSpec {
  StatePrep::Kind kind = StatePrep::Kind::GHZ;
  std::optional<Eigen::VectorXcd> amplitudes;  // ExplicitPure
  enum class RotationMode { None, Explicit, Random };
  RotationMode rotation_mode = RotationMode::None;
  std::vector<std::array<double, 3>> rotations;
};

struct ExperimentConfig {
  NetworkTopology topology;
  std::vector<PrepSpec> preps;          // one per source
  std::vector<ChannelSpec> channels;    // one per qubit (possibly all None)
  std::optional<double> source_noise_gamma;
  InferMethod method = InferMethod::Covariance;
  OptimizerConfig optimizer;            // carries the master seed
  ShotConfig shots;
  double threshold = 0.05;
  std::optional<MeasurementSettings> settings;  // simulate basis; default computational
  std::optional<CorrelationMatrix> ideal;
  std::vector<double> gamma_grid;       // sweep-noise
  int trials = 10;                      // sweep-noise
};

namespace detail {

inline ChannelSpec::Kind channel_kind_from_name(const std::string& name) {
  if (name == "none") return ChannelSpec::Kind::None;
  if (name == "depolarizing") return ChannelSpec::Kind::Depolarizing;
  if (name == "amplitude-damping") return ChannelSpec::Kind::AmplitudeDamping;
  raise(Errc::ConfigError, "unknown channel kind '" + name + "'");
}

inline ChannelSpec channel_spec_from_json(const nlohmann::json& j) {
  ChannelSpec spec;
  spec.kind = channel_kind_from_name(j.value("kind", std::string("none")));
  spec.gamma = j.value("gamma", 0.0);
  require(spec.gamma >= 0.0 && spec.gamma <= 1.0, Errc::ConfigError,
          "channel gamma must be in [0, 1]");
  return spec;
}

inline StatePrep::Kind prep_kind_from_name(const std::string& name) {
  if (name == "ghz") return StatePrep::Kind::GHZ;
  if (name == "w") return StatePrep::Kind::W;
  if (name == "bell") return StatePrep::Kind::Bell;
  if (name == "zero") return StatePrep::Kind::Zero;
  if (name == "pure") return StatePrep::Kind::ExplicitPure;
  raise(Errc::ConfigError, "unknown preparation kind '" + name + "'");
}

inline PrepSpec prep_spec_from_json(const nlohmann::json& j) {
  PrepSpec spec;
  spec.kind = prep_kind_from_name(j.value("kind", std::string("ghz")));
  if (spec.kind == StatePrep::Kind::ExplicitPure) {
    require(j.contains("amplitudes"), Errc::ConfigError, "pure preparation needs 'amplitudes'");
    const auto& amps = j.at("amplitudes");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const auto& pair = amps.at(i);
      require(pair.is_array() && pair.size() == 2, Errc::ConfigError,
              "amplitudes must be [re, im] pairs");
      v[static_cast<Eigen::Index>(i)] = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    spec.amplitudes = std::move(v);
  }
  if (j.contains("rotations")) {
    const auto& rot = j.at("rotations");
    if (rot.is_string()) {
      require(rot.get<std::string>() == "random", Errc::ConfigError,
              "rotations must be 'random' or a list of angle triples");
      spec.rotation_mode = PrepSpec::RotationMode::Random;
    } else {
      spec.rotation_mode = PrepSpec::RotationMode::Explicit;
      spec.rotations = rot.get<std::vector<std::array<double, 3>>>();
    }
  }
  return spec;
}

inline MeasurementSettings settings_from_json(const nlohmann::json& j, int num_qubits) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "computational") return uniform_settings(num_qubits, computational_basis_angles());
    if (name == "sigma-x") return uniform_settings(num_qubits, sigma_x_basis_angles());
    raise(Errc::ConfigError, "unknown settings name '" + name + "'");
  }
  MeasurementSettings s{j.get<std::vector<std::array<double, 3>>>()};
  require(s.num_qubits() == num_qubits, Errc::ConfigError,
          "settings must list one angle triple per qubit");
  return s;
}

}  // namespace detail

inline InferMethod infer_method_from_name(const std::string& name) {
  if (name == "covariance") return InferMethod::Covariance;
  if (name == "char-per-pair") return InferMethod::CharacteristicPerPair;
  if (name == "char-shared") return InferMethod::CharacteristicShared;
  raise(Errc::ConfigError, "unknown method '" + name + "'");
}

/// Parses "a:b:step" or a JSON list into a gamma grid.
inline std::vector<double> parse_gamma_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  require(first != std::string::npos && second != std::string::npos, Errc::ConfigError,
          "gamma grid must be 'start:stop:step'");
  double a = 0, b = 0, step = 0;
  try {
    a = std::stod(text.substr(0, first));
    b = std::stod(text.substr(first + 1, second - first - 1));
    step = std::stod(text.substr(second + 1));
  } catch (const std::exception&) {
    raise(Errc::ConfigError, "bad gamma grid '" + text + "'");
  }
  require(step > 0.0 && a <= b, Errc::ConfigError, "gamma grid must ascend with positive step");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double g = a + k * step;
    if (g > b + 1e-12) break;
    grid.push_back(std::min(g, 1.0));
  }
  for (double g : grid)
    require(g >= 0.0 && g <= 1.0, Errc::ConfigError, "gamma grid values must lie in [0, 1]");
  return grid;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  require(j.is_object(), Errc::ConfigError, "config must be a JSON object");
  require(j.contains("schema") && j.at("schema").get<int>() == 1, Errc::ConfigError,
          "config needs 'schema': 1");
  require(j.contains("topology"), Errc::ConfigError, "config needs a 'topology'");

  ExperimentConfig config;
  try {
    const auto& topo = j.at("topology");
    if (topo.is_object() && topo.contains("file")) {
      // Topology by reference: a JSON document with qubits/sources/nodes.
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(read_file(topo.at("file").get<std::string>()));
      } catch (const nlohmann::json::exception& e) {
        raise(Errc::ConfigError, std::string("topology file: ") + e.what());
      }
      config.topology = topology_from_json(doc);
    } else {
      config.topology = topology_from_json(topo);
    }
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    raise(Errc::ConfigError, std::string("invalid topology: ") + e.what());
  }
  const int nq = config.topology.num_qubits;

  if (j.contains("preps")) {
    for (const auto& p : j.at("preps")) config.preps.push_back(detail::prep_spec_from_json(p));
    require(config.preps.size() == config.topology.sources.size(), Errc::ConfigError,
            "need one preparation per source");
  } else {
    config.preps.assign(config.topology.sources.size(), PrepSpec{});
  }

  config.channels.assign(static_cast<std::size_t>(nq), ChannelSpec{});
  if (j.contains("channels") && !j.at("channels").is_null()) {
    const auto& ch = j.at("channels");
    if (ch.is_array()) {
      require(ch.size() == static_cast<std::size_t>(nq), Errc::ConfigError,
              "channel list must name one channel per qubit");
      for (std::size_t q = 0; q < ch.size(); ++q)
        config.channels[q] = detail::channel_spec_from_json(ch.at(q));
    } else {
      const ChannelSpec broadcast = detail::channel_spec_from_json(ch);
      config.channels.assign(static_cast<std::size_t>(nq), broadcast);
    }
  }

  if (j.contains("source_noise") && !j.at("source_noise").is_null()) {
    const auto& sn = j.at("source_noise");
    require(detail::channel_kind_from_name(sn.value("kind", std::string("depolarizing"))) ==
                ChannelSpec::Kind::Depolarizing,
            Errc::ConfigError, "source noise supports only joint depolarizing");
    const double gamma = sn.value("gamma", 0.0);
    require(gamma >= 0.0 && gamma <= 1.0, Errc::ConfigError, "source noise gamma must be in [0, 1]");
    config.source_noise_gamma = gamma;
  }

  if (j.contains("method")) config.method = infer_method_from_name(j.at("method").get<std::string>());

  if (j.contains("optimizer")) {
    const auto& opt = j.at("optimizer");
    config.optimizer.step_size = opt.value("step_size", 0.05);
    config.optimizer.steps = opt.value("steps", 30);
    config.optimizer.restarts = opt.value("restarts", 10);
    require(config.optimizer.step_size > 0.0, Errc::ConfigError, "step_size must be positive");
    require(config.optimizer.steps >= 1 && config.optimizer.restarts >= 1, Errc::ConfigError,
            "steps and restarts must be at least 1");
  }
  config.optimizer.seed = j.value("seed", std::uint64_t{0});

  if (j.contains("shots") && !j.at("shots").is_null()) {
    const auto& shots = j.at("shots");
    if (shots.is_string()) {
      require(shots.get<std::string>() == "analytic", Errc::ConfigError,
              "shots must be a positive integer or 'analytic'");
    } else {
      const std::int64_t n = shots.get<std::int64_t>();
      require(n >= 1, Errc::ConfigError, "shots must be at least 1");
      config.shots.shots = n;
    }
  }

  config.threshold = j.value("threshold", 0.05);
  require(config.threshold >= 0.0 && std::isfinite(config.threshold), Errc::ConfigError,
          "threshold must be finite and nonnegative");

  if (j.contains("settings")) config.settings = detail::settings_from_json(j.at("settings"), nq);
  if (j.contains("ideal_matrix") && !j.at("ideal_matrix").is_null())
    config.ideal = correlation_matrix_from_json(j.at("ideal_matrix"));

  if (j.contains("gamma_grid")) {
    const auto& grid = j.at("gamma_grid");
    if (grid.is_string()) {
      config.gamma_grid = parse_gamma_grid(grid.get<std::string>());
    } else {
      config.gamma_grid = grid.get<std::vector<double>>();
      for (double g : config.gamma_grid)
        require(g >= 0.0 && g <= 1.0, Errc::ConfigError, "gamma grid values must lie in [0, 1]");
    }
  }
  config.trials = j.value("trials", 10);
  require(config.trials >= 1, Errc::ConfigError, "trials must be at least 1");
  return config;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::ConfigError, path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::ConfigError, path.string() + ": " + e.what());
  }
}

/// Materializes the simulated experiment. Random hidden rotations are
/// drawn from the master seed, so they are part of the reproducible run.
inline PipelineInput build_pipeline_input(const ExperimentConfig& config) {
  PipelineInput input;
  input.topology = config.topology;
  for (std::size_t s = 0; s < config.preps.size(); ++s) {
    const PrepSpec& spec = config.preps[s];
    const int n = static_cast<int>(config.topology.sources[s].size());
    StatePrep prep;
    switch (spec.kind) {
      case StatePrep::Kind::GHZ: prep = ghz_prep(n); break;
      case StatePrep::Kind::W:
        require(n >= 2, Errc::ConfigError, "w preparation needs a source of at least two qubits");
        prep = w_prep(n);
        break;
      case StatePrep::Kind::Bell:
        require(n == 2, Errc::ConfigError, "bell preparation needs a two-qubit source");
        prep = bell_prep();
        break;
      case StatePrep::Kind::Zero: prep = zero_prep(n); break;
      case StatePrep::Kind::ExplicitPure:
        prep = pure_prep(*spec.amplitudes);
        require(prep.num_qubits == n, Errc::ConfigError,
                "amplitude vector does not match source size");
        break;
      case StatePrep::Kind::ExplicitMixed:
        raise(Errc::ConfigError, "explicit mixed preparations are not available in configs");
    }
    switch (spec.rotation_mode) {
      case PrepSpec::RotationMode::None: break;
      case PrepSpec::RotationMode::Explicit:
        require(static_cast<int>(spec.rotations.size()) == n, Errc::ConfigError,
                "need one rotation triple per source qubit");
        prep = with_rotations(std::move(prep), spec.rotations);
        break;
      case PrepSpec::RotationMode::Random: {
        Rng rng(derive_seed(config.optimizer.seed, {0xB0, static_cast<std::uint64_t>(s)}));
        std::vector<std::array<double, 3>> rot(static_cast<std::size_t>(n));
        for (auto& a : rot)
          for (double& v : a) v = rng.uniform(0.0, 2.0 * M_PI);
        prep = with_rotations(std::move(prep), rot);
        break;
      }
    }
    input.preps.push_back(std::move(prep));
  }

  bool any_channel = false;
  for (const auto& ch : config.channels)
    if (ch.kind != ChannelSpec::Kind::None) any_channel = true;
  if (any_channel) {
    for (const auto& ch : config.channels) {
      switch (ch.kind) {
        case ChannelSpec::Kind::None: input.link_channels.push_back(identity_channel()); break;
        case ChannelSpec::Kind::Depolarizing:
          input.link_channels.push_back(depolarizing_channel(ch.gamma));
          break;
        case ChannelSpec::Kind::AmplitudeDamping:
          input.link_channels.push_back(amplitude_damping_channel(ch.gamma));
          break;
      }
    }
  }
  input.source_depolarizing_gamma = config.source_noise_gamma;
  return input;
}

}  // namespace qni
