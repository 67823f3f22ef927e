#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chanspec/config.hpp"

using namespace chanspec;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

const char* kTwoSpinConfig = R"(
# two-spin demo
[model]
kind = "two_spin"
omega_hz = 1000.0
d_hz = 105.34
h_hz = [190.9859, 211.6761]
h_dirs = [[0.8660254, 0.0, 0.5], [0.0, 0.8660254, 0.5]]
tau_a_s = 100e-6
tau_b_s = 227.3e-6
phi_rad = 0.7853981633974483

[simulation]
cycles = 100
samples = 1000
seed = 42
outcome = 1
initial_state = "product"
bloch = [[0.8191520, 0.0, 0.5735764], [0.9063078, 0.0, -0.4226183]]

[analysis]
pattern = "two_spin"
truth_hz = [1000.0, 105.34]

[output]
dir = "out"
)";

}  // namespace

TEST_CASE("toml parsing: tables, arrays, comments, types") {
  TomlDoc doc = parse_toml(R"(
title = "top"   # inline comment
[alpha]
num = 4.5e-3
flag = true
items = [1, 2, 3]
nested = [[1, 0, 0], [0, 1, 0]]
name = "x # not a comment"
[[alpha.terms]]
coeff_hz = 2.0
sites = [0]
axes = "x"
[[alpha.terms]]
coeff_hz = -1.0
sites = [0, 1]
axes = "zz"
)");
  CHECK(doc.tables[""].at("title").str == "top");
  const TomlTable& a = doc.tables.at("alpha");
  CHECK(a.at("num").number == doctest::Approx(4.5e-3));
  CHECK(a.at("flag").boolean);
  CHECK(a.at("items").array.size() == 3);
  CHECK(a.at("nested").array[1].array[1].number == 1.0);
  CHECK(a.at("name").str == "x # not a comment");
  REQUIRE(doc.table_arrays.at("alpha.terms").size() == 2);
  CHECK(doc.table_arrays.at("alpha.terms")[1].at("axes").str == "zz");

  CHECK_THROWS_AS(parse_toml("key 4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_toml("key = [1, 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_toml("key = 1x2"), std::invalid_argument);
}

TEST_CASE("run config parses and validates") {
  RunConfig cfg = RunConfig::from_doc(parse_toml(kTwoSpinConfig));
  CHECK(cfg.model.kind == "two_spin");
  CHECK(cfg.model.d_hz.size() == 1);
  CHECK(cfg.simulation.samples == 1000);
  CHECK(cfg.simulation.bloch.size() == 2);
  CHECK(cfg.analysis.pattern == "two_spin");

  BuiltModel model = build_model(cfg.model);
  CHECK(model.channel.kraus.dim == 4);
  CHECK(model.channel.kraus.trace_preserving_residual() < 1e-10);
  StateVec rho0 = initial_state(cfg, model.channel.kraus.dim);
  CHECK(std::abs(unvectorize(rho0.rho_vec).trace() - Complex(1, 0)) < 1e-14);
}

TEST_CASE("hz to rad/s conversion is a factor of 2pi") {
  TomlDoc doc = parse_toml(R"(
[model]
kind = "custom"
spins = 1
tau_a_s = 1.0
tau_b_s = 1.0
[[model.b_terms]]
coeff_hz = 1.0
sites = [0]
axes = "z"
[[model.a_terms]]
coeff_hz = 0.5
sites = [0]
axes = "x"
)");
  RunConfig cfg = RunConfig::from_doc(doc);
  REQUIRE(cfg.model.b_terms.size() == 1);
  CHECK(cfg.model.b_terms[0].coeff_rad_s == doctest::Approx(kTwoPi));
  CHECK(cfg.model.a_terms[0].coeff_rad_s == doctest::Approx(0.5 * kTwoPi));
  // 1 Hz on sigma_z/2: eigenvalues +- pi rad/s
  BuiltModel model = build_model(cfg.model);
  HermEig eig = eig_hermitian(model.b.assembled);
  CHECK(eig.values[1] == doctest::Approx(M_PI));
}

TEST_CASE("config validation failures") {
  CHECK_THROWS_AS(RunConfig::from_doc(parse_toml("[model]\nkind = \"bogus\"\n"
                                                 "tau_a_s = 1.0\ntau_b_s = 1.0\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_doc(parse_toml("[model]\nkind = \"two_spin\"\n"
                                                 "tau_a_s = 0.0\ntau_b_s = 1.0\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_doc(parse_toml(
                      "[model]\nkind = \"two_spin\"\ntau_a_s = 1.0\ntau_b_s = 1.0\n"
                      "[analysis]\npattern = \"nope\"\n")),
                  std::invalid_argument);
  // missing model section
  CHECK_THROWS_AS(RunConfig::from_doc(parse_toml("[simulation]\ncycles = 5\n")),
                  std::invalid_argument);
}

TEST_CASE("single_spin model builds the probe-spin channel") {
  TomlDoc doc = parse_toml(R"(
[model]
kind = "single_spin"
g_hz = 0.15
omega_hz = 0.2
tau_a_s = 1.0
tau_b_s = 1.0
)");
  RunConfig cfg = RunConfig::from_doc(doc);
  BuiltModel model = build_model(cfg.model);
  // mu = g tau_A (angular), nu = omega tau_B
  double mu = kTwoPi * 0.15, nu = kTwoPi * 0.2;
  Example1Spectrum want = example1_analytic(mu, nu);
  ChannelSpectrum cs = spectral_decompose(model.channel.superop);
  for (Complex w : want.values) {
    double best = 1e9;
    for (Eigen::Index j = 0; j < cs.values.size(); ++j) {
      best = std::min(best, std::abs(cs.values[j] - w));
    }
    CHECK(best < 1e-10);
  }
}
