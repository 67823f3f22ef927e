#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chanspec/models.hpp"
#include "chanspec/trajectory.hpp"

using namespace chanspec;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

ConcatenatedChannel fig2_channel(double tau_a = 100e-6, double phi = M_PI / 4) {
  SpinClusterParams p;
  p.h_rad_s = {1200.0, 1330.0};
  double s = std::sin(M_PI / 3), c = std::cos(M_PI / 3);
  p.h_dirs = {{s, 0, c}, {0, s, c}};
  p.omega_rad_s = kTwoPi * 1000.0;
  p.d_rad_s = {kTwoPi * 105.34};
  auto [a, b] = spin_cluster_hamiltonians(ClusterKind::TwoSpinMain, p);
  RimParams rp;
  rp.tau_a_s = tau_a;
  rp.phi_rad = phi;
  return concatenate(rim_channel(a, rp), unitary_channel(b, 227.3e-6));
}

StateVec fig2_state() {
  double a1 = 55.0 * M_PI / 180, a2 = 115.0 * M_PI / 180;
  return product_state({{std::sin(a1), 0, std::cos(a1)}, {std::sin(a2), 0, std::cos(a2)}});
}

}  // namespace

TEST_CASE("state construction and validation") {
  StateVec mm = maximally_mixed(4);
  CHECK(std::abs(unvectorize(mm.rho_vec).trace() - Complex(1, 0)) < 1e-15);

  StateVec ps = product_state({{1, 0, 0}, {0, 0, 1}});
  CMat rho = unvectorize(ps.rho_vec);
  CHECK(std::abs(rho.trace() - Complex(1, 0)) < 1e-15);
  HermEig eig = eig_hermitian(rho);
  CHECK(eig.values.minCoeff() > -1e-12);

  CHECK_THROWS_AS(product_state({{1.2, 0, 0}}), std::invalid_argument);
  CMat bad = CMat::Identity(2, 2);  // trace 2
  CHECK_THROWS_AS(StateVec::from_density(bad), std::invalid_argument);
}

TEST_CASE("decoupled probe gives a constant outcome probability") {
  HamiltonianSpec zero_a = build_hamiltonian(1, {});
  HamiltonianSpec bz = build_hamiltonian(1, {PauliTerm{1.0, {0}, "z"}});
  RimParams rp;
  rp.tau_a_s = 1.0;
  rp.phi_rad = M_PI / 2;
  ConcatenatedChannel ch = concatenate(rim_channel(zero_a, rp), unitary_channel(bz, 1.0));
  FrequencySeries f = exact_probabilities(ch.kraus, maximally_mixed(2), 1, 50);
  for (double v : f.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact probabilities match the spectral decomposition (Eq. 4 form)") {
  ConcatenatedChannel ch = fig2_channel();
  StateVec rho0 = fig2_state();
  const int n = 500;
  FrequencySeries p = exact_probabilities(ch.kraus, rho0, 1, n);
  ChannelSpectrum cs = spectral_decompose(ch.superop);
  ExponentialModel model = decompose_coefficients(ch.kraus, cs, rho0, 1);
  double worst = 0;
  for (int m = 1; m <= n; ++m) {
    worst = std::max(worst, std::abs(model.eval(m) - p.values[static_cast<size_t>(m - 1)]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("coefficients: conjugate modes carry conjugate amplitudes; sum is p1") {
  ConcatenatedChannel ch = fig2_channel();
  StateVec rho0 = fig2_state();
  ChannelSpectrum cs = spectral_decompose(ch.superop);
  ExponentialModel model = decompose_coefficients(ch.kraus, cs, rho0, 1);

  Complex sum = 0;
  for (const ExpMode& m : model.modes) sum += m.amplitude;
  FrequencySeries p = exact_probabilities(ch.kraus, rho0, 1, 1);
  CHECK(std::abs(sum - Complex(p.values[0], 0)) < 1e-10);

  for (Eigen::Index j = 0; j < cs.values.size(); ++j) {
    int pj = cs.partner[j];
    if (pj < 0) continue;
    CHECK(std::abs(model.modes[static_cast<size_t>(j)].amplitude -
                   std::conj(model.modes[static_cast<size_t>(pj)].amplitude)) < 1e-9);
  }

  // model evaluation stays real (conjugate pairs cancel imaginary parts)
  for (int m = 1; m <= 20; ++m) {
    Complex acc = 0;
    for (const ExpMode& mode : model.modes) {
      acc += mode.amplitude * std::pow(mode.pole, m - 1);
    }
    CHECK(std::abs(acc.imag()) < 1e-10);
  }
}

TEST_CASE("identity channel: single effective mode") {
  KrausSet id = KrausSet::create({CMat::Identity(2, 2)});
  StateVec rho0 = product_state({{0.6, 0, 0.4}});
  ChannelSpectrum cs = spectral_decompose(natural_representation(id));
  ExponentialModel model = decompose_coefficients(id, cs, rho0, 0);
  FrequencySeries p = exact_probabilities(id, rho0, 0, 10);
  for (int m = 1; m <= 10; ++m) {
    CHECK(model.eval(m) == doctest::Approx(p.values[static_cast<size_t>(m - 1)]));
    CHECK(p.values[static_cast<size_t>(m - 1)] == doctest::Approx(p.values[0]));
  }
}

TEST_CASE("sampled frequencies: outcome sums, determinism, binomial agreement") {
  ConcatenatedChannel ch = fig2_channel();
  StateVec rho0 = fig2_state();
  const int n = 60;
  const std::uint64_t s = 16384, seed = 99;  // power of two keeps count/S exact

  auto f1 = sample_trajectories(ch.kraus, rho0, n, s, seed, 1);
  auto f8 = sample_trajectories(ch.kraus, rho0, n, s, seed, 8);
  REQUIRE(f1.size() == 2);
  for (int m = 0; m < n; ++m) {
    CHECK(f1[0].values[static_cast<size_t>(m)] + f1[1].values[static_cast<size_t>(m)] ==
          1.0);
    // bit-for-bit, independent of worker count
    CHECK(f1[1].values[static_cast<size_t>(m)] == f8[1].values[static_cast<size_t>(m)]);
  }

  auto g = sample_trajectories(ch.kraus, rho0, n, s, seed + 1, 2);
  bool any_diff = false;
  for (int m = 0; m < n; ++m) {
    any_diff |= g[1].values[static_cast<size_t>(m)] != f1[1].values[static_cast<size_t>(m)];
  }
  CHECK(any_diff);

  FrequencySeries p = exact_probabilities(ch.kraus, rho0, 1, n);
  int within = 0;
  for (int m = 0; m < n; ++m) {
    double pm = p.values[static_cast<size_t>(m)];
    double sigma = std::sqrt(pm * (1 - pm) / double(s));
    if (std::abs(f1[1].values[static_cast<size_t>(m)] - pm) <= 4 * sigma) ++within;
  }
  CHECK(within >= n - 1);
}

TEST_CASE("decoupled probe sampling stays near one half") {
  HamiltonianSpec zero_a = build_hamiltonian(1, {});
  HamiltonianSpec bz = build_hamiltonian(1, {PauliTerm{1.0, {0}, "z"}});
  RimParams rp;
  rp.tau_a_s = 1.0;
  rp.phi_rad = M_PI / 2;
  ConcatenatedChannel ch = concatenate(rim_channel(zero_a, rp), unitary_channel(bz, 1.0));
  const std::uint64_t s = 32768;
  auto f = sample_trajectories(ch.kraus, maximally_mixed(2), 30, s, 7, 2);
  double sigma = std::sqrt(0.25 / double(s));
  for (double v : f[1].values) {
    CHECK(std::abs(v - 0.5) <= 4 * sigma);
  }
}

TEST_CASE("sampling validates inputs") {
  ConcatenatedChannel ch = fig2_channel();
  CHECK_THROWS_AS(sample_trajectories(ch.kraus, fig2_state(), 10, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_trajectories(ch.kraus, maximally_mixed(2), 10, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(exact_probabilities(ch.kraus, fig2_state(), 5, 10),
                  std::invalid_argument);
}

TEST_CASE("splitmix streams differ across trajectory indices") {
  std::uint64_t a = SplitMix64::derive_stream(123, 0);
  std::uint64_t b = SplitMix64::derive_stream(123, 1);
  std::uint64_t c = SplitMix64::derive_stream(124, 0);
  CHECK(a != b);
  CHECK(a != c);
  SplitMix64 g(a);
  for (int i = 0; i < 1000; ++i) {
    double u = g.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
