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

#include "qni/channels.hpp"
#include "qni/measure.hpp"
#include "qni/prep.hpp"
#include "support.hpp"

using namespace qni;
using namespace qni::testing;

namespace {

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Random CPTP single-qubit channel with `k` Kraus operators: QR of a
// random complex 2k x 2 matrix gives an isometry whose 2 x 2 blocks
// satisfy the completeness relation by construction.
KrausChannel random_channel(Rng& rng, int k) {
  Eigen::MatrixXcd g(2 * k, 2);
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c)
      g(r, c) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(2 * k, 2);
  KrausChannel channel;
  for (int i = 0; i < k; ++i) channel.ops.push_back(q.block(2 * i, 0, 2, 2));
  return channel;
}

DensityMatrix random_mixed_state(Rng& rng, int num_qubits, int rank = 3) {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  Eigen::MatrixXcd g(d, rank);
  for (Eigen::Index r = 0; r < d; ++r)
    for (int c = 0; c < rank; ++c) g(r, c) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return density_from_matrix(num_qubits, std::move(rho));
}

}  // namespace

TEST_CASE("single Bell source prepares |Phi><Phi|", "[prep]") {
  const auto t = make_topology(2, {{0, 1}}, {{0}, {1}});
  const DensityMatrix rho = prepare_network_state(t, {bell_prep()});
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(4);
  phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
  CHECK(max_abs_diff(rho.mat, (phi * phi.adjoint())) < 1e-14);
  CHECK_NOTHROW(check_physical(rho));
}

TEST_CASE("interleaved GHZ3 sources give shared-random-bit pair marginals", "[prep]") {
  const NetworkTopology t = triangle_network_2();
  const DensityMatrix rho = prepare_network_state(t, {ghz_prep(3), ghz_prep(3)});
  // Any pair of qubits from one source reduces to (|00><00| + |11><11|)/2,
  // and cross-source pairs factorize into I/2 x I/2.
  Eigen::MatrixXcd sigma2 = Eigen::MatrixXcd::Zero(4, 4);
  sigma2(0, 0) = sigma2(3, 3) = 0.5;
  const DensityMatrix same_source = partial_trace(rho, {0, 2});
  CHECK(max_abs_diff(same_source.mat, sigma2) < 1e-12);
  const DensityMatrix cross_source = partial_trace(rho, {0, 1});
  CHECK(max_abs_diff(cross_source.mat, Eigen::MatrixXcd::Identity(4, 4) / 4.0) < 1e-12);
  // Joint state of two nodes: (|00><00| + |11><11|)/2 tensor same, up to
  // qubit interleaving.
  const DensityMatrix nodes01 = partial_trace(rho, {0, 1, 2, 3});
  const DensityMatrix regrouped = relayout_to_ascending(nodes01, {0, 2, 1, 3});
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(16, 16);
  for (int a : {0, 3})
    for (int b : {0, 3}) want(4 * a + b, 4 * a + b) = 0.25;
  CHECK(max_abs_diff(regrouped.mat, want) < 1e-12);
}

TEST_CASE("W3 tensor Bell: single-qubit marginal of the W block", "[prep]") {
  const auto t = make_topology(5, {{0, 1, 2}, {3, 4}}, {{0}, {1}, {2}, {3}, {4}});
  const DensityMatrix rho = prepare_network_state(t, {w_prep(3), bell_prep()});
  const DensityMatrix q0 = partial_trace(rho, {0});
  CHECK(q0.mat(0, 0).real() == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(q0.mat(1, 1).real() == Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(std::abs(q0.mat(0, 1)) < 1e-12);
}

TEST_CASE("explicit preparations validate their inputs", "[prep]") {
  // Explicit mixed source: the two-qubit shared random bit.
  Eigen::MatrixXcd sigma2 = Eigen::MatrixXcd::Zero(4, 4);
  sigma2(0, 0) = sigma2(3, 3) = 0.5;
  const auto t = make_topology(3, {{0, 2}, {1}}, {{0}, {1}, {2}});
  const DensityMatrix rho = prepare_network_state(t, {mixed_prep(2, sigma2), zero_prep(1)});
  CHECK_NOTHROW(check_physical(rho));
  CHECK(max_abs_diff(partial_trace(rho, {0, 2}).mat, sigma2) < 1e-14);

  Eigen::MatrixXcd junk = Eigen::MatrixXcd::Identity(4, 4);
  CHECK_THROWS_AS(mixed_prep(2, junk), Error);

  Eigen::VectorXcd unnormalized(2);
  unnormalized << 1.0, 1.0;
  CHECK_THROWS_AS(pure_prep(unnormalized), Error);

  Eigen::VectorXd bad_probs(2);
  bad_probs << 0.5, 0.4;
  CHECK_THROWS_AS(analytic_distribution(1, bad_probs), Error);
  Eigen::VectorXd negative(2);
  negative << 1.1, -0.1;
  CHECK_THROWS_AS(analytic_distribution(1, negative), Error);
}

TEST_CASE("network state does not depend on source ordering", "[prep]") {
  Rng rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    const int nq = 4 + static_cast<int>(rng.below(3));
    const NetworkTopology t = random_topology(rng, nq, 2);
    std::vector<StatePrep> preps;
    for (const auto& s : t.sources)
      preps.push_back(rng.below(2) == 0 ? ghz_prep(static_cast<int>(s.size()))
                                        : w_prep(static_cast<int>(s.size())));
    const DensityMatrix a = prepare_network_state(t, preps);

    NetworkTopology reversed = t;
    std::reverse(reversed.sources.begin(), reversed.sources.end());
    std::vector<StatePrep> reversed_preps(preps.rbegin(), preps.rend());
    const DensityMatrix b = prepare_network_state(reversed, reversed_preps);
    CHECK(max_abs_diff(a.mat, b.mat) < 1e-12);
  }
}

TEST_CASE("partial trace examples", "[density]") {
  const auto bell = prepare_state(bell_prep());
  CHECK(max_abs_diff(partial_trace(bell, {0}).mat, Eigen::MatrixXcd::Identity(2, 2) / 2.0) < 1e-14);

  const auto ghz3 = prepare_state(ghz_prep(3));
  Eigen::MatrixXcd sigma2 = Eigen::MatrixXcd::Zero(4, 4);
  sigma2(0, 0) = sigma2(3, 3) = 0.5;
  CHECK(max_abs_diff(partial_trace(ghz3, {0, 2}).mat, sigma2) < 1e-14);

  const auto w3 = prepare_state(w_prep(3));
  const DensityMatrix first = partial_trace(w3, {0});
  CHECK(first.mat(0, 0).real() == Catch::Approx(2.0 / 3.0));
  CHECK(first.mat(1, 1).real() == Catch::Approx(1.0 / 3.0));

  CHECK(std::abs(partial_trace(w3, {1, 2}).mat.trace().real() - 1.0) < 1e-14);
  CHECK_THROWS_AS(partial_trace(w3, {0, 7}), Error);
}

TEST_CASE("depolarizing channel Kraus weights", "[channels]") {
  const KrausChannel c = depolarizing_channel(0.5);
  REQUIRE(c.ops.size() == 4);
  CHECK(c.ops[0].cwiseAbs().maxCoeff() == Catch::Approx(std::sqrt(5.0 / 8.0)));
  for (int i = 1; i < 4; ++i) CHECK(c.ops[static_cast<std::size_t>(i)].cwiseAbs().maxCoeff() ==
                                    Catch::Approx(std::sqrt(1.0 / 8.0)));
  CHECK_THROWS_AS(depolarizing_channel(-0.1), Error);
  CHECK_THROWS_AS(depolarizing_channel(1.5), Error);
}

TEST_CASE("identity and fully depolarizing channels", "[channels]") {
  const auto bell = prepare_state(bell_prep());
  const DensityMatrix same = apply_link_channels(bell, {identity_channel(), identity_channel()});
  CHECK(max_abs_diff(same.mat, bell.mat) < 1e-14);

  const DensityMatrix mixed =
      apply_link_channels(bell, {depolarizing_channel(1.0), depolarizing_channel(1.0)});
  CHECK(max_abs_diff(mixed.mat, Eigen::MatrixXcd::Identity(4, 4) / 4.0) < 1e-12);

  // gamma = 0 keeps the state exactly.
  const DensityMatrix untouched =
      apply_link_channels(bell, {depolarizing_channel(0.0), depolarizing_channel(0.0)});
  CHECK(max_abs_diff(untouched.mat, bell.mat) < 1e-14);
}

TEST_CASE("per-qubit depolarizing on a Bell pair has the closed form", "[channels]") {
  const auto bell = prepare_state(bell_prep());
  for (double gamma : {0.1, 0.3, 0.7}) {
    const DensityMatrix noisy =
        apply_link_channels(bell, {depolarizing_channel(gamma), depolarizing_channel(gamma)});
    const Eigen::MatrixXcd want = (gamma * (2.0 - gamma) / 4.0) * Eigen::MatrixXcd::Identity(4, 4) +
                                  (1.0 - gamma) * (1.0 - gamma) * bell.mat;
    CHECK(max_abs_diff(noisy.mat, want) < 1e-12);
  }
}

TEST_CASE("source-level depolarizing acts jointly", "[channels]") {
  const auto bell = prepare_state(bell_prep());
  const double gamma = 0.4;
  const DensityMatrix noisy = apply_channel_on_qubits(bell, depolarizing_channel(gamma, 2), {0, 1});
  const Eigen::MatrixXcd want =
      (1.0 - gamma) * bell.mat + (gamma / 4.0) * Eigen::MatrixXcd::Identity(4, 4);
  CHECK(max_abs_diff(noisy.mat, want) < 1e-12);
}

TEST_CASE("amplitude damping on a Bell pair reproduces the 4x4 closed form", "[channels]") {
  const auto bell = prepare_state(bell_prep());
  for (double gamma : {0.0, 0.25, 0.6, 1.0}) {
    const DensityMatrix noisy = apply_link_channels(
        bell, {amplitude_damping_channel(gamma), amplitude_damping_channel(gamma)});
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
    want(0, 0) = (1.0 + gamma * gamma) / 2.0;
    want(0, 3) = want(3, 0) = (1.0 - gamma) / 2.0;
    want(1, 1) = want(2, 2) = gamma * (1.0 - gamma) / 2.0;
    want(3, 3) = (1.0 - gamma) * (1.0 - gamma) / 2.0;
    CHECK(max_abs_diff(noisy.mat, want) < 1e-12);
  }
  // gamma = 1 maps everything onto |0>.
  const DensityMatrix dead =
      apply_link_channels(bell, {amplitude_damping_channel(1.0), amplitude_damping_channel(1.0)});
  CHECK(dead.mat(0, 0).real() == Catch::Approx(1.0));
}

TEST_CASE("random channels preserve trace and Hermiticity", "[channels]") {
  Rng rng(31337);
  for (int trial = 0; trial < 25; ++trial) {
    const KrausChannel channel = random_channel(rng, 2 + static_cast<int>(rng.below(3)));
    CHECK_NOTHROW(check_complete(channel));
    const DensityMatrix rho = random_mixed_state(rng, 2);
    const DensityMatrix out = apply_channel_on_qubits(rho, channel, {static_cast<int>(rng.below(2))});
    CHECK(std::abs(out.mat.trace().real() - 1.0) < 1e-10);
    CHECK(max_abs_diff(out.mat, out.mat.adjoint()) < 1e-10);
  }
  KrausChannel broken{{pauli_x() * 0.5}};
  CHECK_THROWS_MATCHES(check_complete(broken), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::IncompleteKrausSet;
                       }));
}

TEST_CASE("depolarizing commutes with local unitaries", "[channels]") {
  Rng rng(777);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = random_mixed_state(rng, 1);
    const Eigen::Matrix2cd u = qubit_unitary({rng.uniform(0, 2 * M_PI), rng.uniform(0, 2 * M_PI),
                                              rng.uniform(0, 2 * M_PI)});
    const KrausChannel ch = depolarizing_channel(0.35);
    const DensityMatrix lhs =
        apply_operator_on_qubits(apply_channel_on_qubits(rho, ch, {0}), u, {0});
    const DensityMatrix rhs =
        apply_channel_on_qubits(apply_operator_on_qubits(rho, u, {0}), ch, {0});
    CHECK(max_abs_diff(lhs.mat, rhs.mat) < 1e-10);
  }
}

TEST_CASE("qubit unitary conventions", "[measure]") {
  CHECK(max_abs_diff(qubit_unitary({0, 0, 0}), Eigen::Matrix2cd::Identity()) < 1e-15);

  // (0, pi/2, 0) measures sigma_x: U^dagger sigma_z U = sigma_x exactly.
  const Eigen::Matrix2cd u = qubit_unitary(sigma_x_basis_angles());
  CHECK(max_abs_diff(u.adjoint() * pauli_z() * u, pauli_x()) < 1e-14);
  CHECK(max_abs_diff(u * u.adjoint(), Eigen::Matrix2cd::Identity()) < 1e-14);

  // (0, pi, 0) is a bit flip up to phases: measuring |0> yields outcome 1.
  Eigen::VectorXcd zero(2);
  zero << 1, 0;
  const auto dist = measurement_probabilities(density_from_pure(zero),
                                              uniform_settings(1, {0.0, M_PI, 0.0}), {0});
  CHECK(dist.probs[1] == Catch::Approx(1.0));
}

TEST_CASE("euler_angles_of inverts qubit_unitary up to measurement equivalence", "[measure]") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix2cd g;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) g(r, c) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(g);
    const Eigen::Matrix2cd u = qr.householderQ();
    const Eigen::Matrix2cd rebuilt = qubit_unitary(euler_angles_of(u));
    // Same projective measurement: conjugated sigma_z must agree.
    CHECK(max_abs_diff(rebuilt.adjoint() * pauli_z() * rebuilt, u.adjoint() * pauli_z() * u) < 1e-9);
  }
}

TEST_CASE("measurement probabilities on canonical states", "[measure]") {
  const auto bell = prepare_state(bell_prep());
  const auto dist = measurement_probabilities(bell, uniform_settings(2, computational_basis_angles()),
                                              {0, 1});
  CHECK(dist.probs[0] == Catch::Approx(0.5));
  CHECK(dist.probs[1] == Catch::Approx(0.0).margin(1e-14));
  CHECK(dist.probs[2] == Catch::Approx(0.0).margin(1e-14));
  CHECK(dist.probs[3] == Catch::Approx(0.5));

  const auto ghz3 = prepare_state(ghz_prep(3));
  const auto d3 = measurement_probabilities(ghz3, uniform_settings(3, computational_basis_angles()),
                                            {0, 1, 2});
  CHECK(d3.probs[0] == Catch::Approx(0.5));
  CHECK(d3.probs[7] == Catch::Approx(0.5));
  CHECK(d3.probs.segment(1, 6).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(measurement_probabilities(bell, uniform_settings(2, {0, 0, 0}), {0, 5}), Error);
}

TEST_CASE("noisy Bell computational statistics match the closed form", "[measure]") {
  for (double gamma : {0.2, 0.5, 0.8}) {
    const auto bell = prepare_state(bell_prep());
    const DensityMatrix noisy =
        apply_link_channels(bell, {depolarizing_channel(gamma), depolarizing_channel(gamma)});
    const auto dist =
        measurement_probabilities(noisy, uniform_settings(2, computational_basis_angles()), {0, 1});
    const double same = (1.0 + (1.0 - gamma) * (1.0 - gamma)) / 4.0;
    CHECK(dist.probs[0] == Catch::Approx(same).margin(1e-12));
    CHECK(dist.probs[3] == Catch::Approx(same).margin(1e-12));
    CHECK(dist.probs[1] == Catch::Approx(0.5 - same).margin(1e-12));
  }
}

TEST_CASE("measurement marginals are consistent", "[measure]") {
  Rng rng(888);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = random_mixed_state(rng, 3);
    const MeasurementSettings settings = random_settings(3, rng.next_u64());
    const auto joint = measurement_probabilities(rho, settings, {0, 2});
    const auto alone = measurement_probabilities(rho, settings, {0});
    CHECK(joint.probs[0] + joint.probs[1] == Catch::Approx(alone.probs[0]).margin(1e-10));
    CHECK(joint.probs[2] + joint.probs[3] == Catch::Approx(alone.probs[1]).margin(1e-10));
  }
}

TEST_CASE("measured qubit order controls outcome bit order", "[measure]") {
  Rng rng(1234);
  const DensityMatrix rho = random_mixed_state(rng, 2);
  const MeasurementSettings settings = random_settings(2, 9);
  const auto ab = measurement_probabilities(rho, settings, {0, 1});
  const auto ba = measurement_probabilities(rho, settings, {1, 0});
  CHECK(ab.probs[0b01] == Catch::Approx(ba.probs[0b10]).margin(1e-12));
  CHECK(ab.probs[0b10] == Catch::Approx(ba.probs[0b01]).margin(1e-12));
}

TEST_CASE("sampling is deterministic and converges", "[sample]") {
  Eigen::VectorXd point = Eigen::VectorXd::Zero(4);
  point[0] = 1.0;
  const auto deterministic = sample_outcomes(analytic_distribution(2, point), 50, 1);
  CHECK(deterministic.counts[0] == 50);

  const auto bell = prepare_state(bell_prep());
  const auto dist =
      measurement_probabilities(bell, uniform_settings(2, computational_basis_angles()), {0, 1});
  const auto a = sample_outcomes(dist, 1000000, 42);
  const auto b = sample_outcomes(dist, 1000000, 42);
  CHECK(a.counts == b.counts);
  // Binomial 3-sigma bound around p = 1/2.
  const double p00 = static_cast<double>(a.counts[0]) / 1e6;
  CHECK(std::abs(p00 - 0.5) < 3.0 * std::sqrt(0.25 / 1e6));

  // Total-variation distance shrinks with more shots.
  auto tv = [&](const OutcomeDistribution& emp) {
    return 0.5 * (emp.frequencies() - dist.probs).cwiseAbs().sum();
  };
  const double tv_small = tv(sample_outcomes(dist, 100, 7));
  const double tv_large = tv(sample_outcomes(dist, 10000, 7));
  CHECK(tv_large < tv_small);

  CHECK_THROWS_AS(sample_outcomes(dist, 0, 3), Error);
}

TEST_CASE("PreparedState marginal caches agree with direct reductions", "[measure]") {
  Rng rng(5150);
  const DensityMatrix rho = random_mixed_state(rng, 4);
  const PreparedState prepared(rho);
  for (int i = 0; i < 4; ++i)
    CHECK(max_abs_diff(prepared.single(i), partial_trace(rho, {i}).mat) < 1e-13);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      CHECK(max_abs_diff(prepared.pair(i, j), partial_trace(rho, {i, j}).mat) < 1e-13);

  // Pair distribution equals the full-path measurement result.
  const MeasurementSettings settings = random_settings(4, 99);
  const auto direct = measurement_probabilities(rho, settings, {1, 3});
  const Eigen::Vector4d cached = prepared.pair_distribution(1, 3, settings.angles[1], settings.angles[3]);
  for (int b = 0; b < 4; ++b) CHECK(cached[b] == Catch::Approx(direct.probs[b]).margin(1e-12));
}
