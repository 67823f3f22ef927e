#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "chanspec/estimation.hpp"

using namespace chanspec;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

EstimatedSpectrum spectrum_from_phases(const std::vector<double>& phases_rad) {
  EstimatedSpectrum est;
  for (double ph : phases_rad) {
    EstimatedPole p;
    p.pole = 0.95 * std::exp(Complex(0, ph));
    p.amplitude = Complex(0.1, 0);
    p.phase_rad = std::arg(p.pole);
    p.phase_deg = p.phase_rad * 180 / M_PI;
    p.magnitude = std::abs(p.pole);
    est.poles.push_back(p);
  }
  return est;
}

std::vector<BetaEstimate> betas_from_hz(const std::vector<double>& hz) {
  std::vector<BetaEstimate> out;
  for (double v : hz) {
    BetaEstimate b;
    b.beta_rad_s = kTwoPi * v;
    out.push_back(b);
  }
  return out;
}

}  // namespace

TEST_CASE("phases_to_betas basics") {
  EstimatedSpectrum est = spectrum_from_phases({-0.3, 0.3, 0.0});
  auto betas = phases_to_betas(est, 1e-3);
  // only the positive-phase member of the pair; zero-phase excluded
  REQUIRE(betas.size() == 1);
  CHECK(betas[0].beta_rad_s == doctest::Approx(300.0));
  CHECK_FALSE(betas[0].aliased);

  EstimatedSpectrum alias = spectrum_from_phases({M_PI - 0.01});
  auto ab = phases_to_betas(alias, 1e-3);
  REQUIRE(ab.size() == 1);
  CHECK(ab[0].aliased);

  EstimatedSpectrum fixed = spectrum_from_phases({0.0});
  fixed.poles[0].pole = 1.0;
  CHECK(phases_to_betas(fixed, 1e-3).empty());

  EstimatedSpectrum zero;
  EstimatedPole p;
  p.pole = 0.0;
  zero.poles.push_back(p);
  CHECK_THROWS_AS(phases_to_betas(zero, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(phases_to_betas(est, 0.0), std::invalid_argument);
}

TEST_CASE("table-driven two-spin estimation") {
  // Estimated phases of the two-spin run (degrees) at tau_B = 227.3 us.
  std::vector<double> phases_deg = {18.07, 57.79, 72.97, 90.46, 109.1, 162.2};
  double tau_b = 227.3e-6;
  std::vector<double> phases_rad;
  for (double d : phases_deg) phases_rad.push_back(d * M_PI / 180);
  EstimatedSpectrum est = spectrum_from_phases(phases_rad);
  auto betas = phases_to_betas(est, tau_b);
  REQUIRE(betas.size() == 6);
  // First row: 18.07 deg over 227.3 us is 220.9 Hz.
  std::vector<double> hz;
  for (const auto& b : betas) hz.push_back(b.beta_rad_s / kTwoPi);
  std::sort(hz.begin(), hz.end());
  CHECK(hz[0] == doctest::Approx(220.90).epsilon(1e-3));

  Eigen::VectorXd truth(2);
  truth << kTwoPi * 1000.0, kTwoPi * 105.34;
  MatchResult res = match_parameters(betas, ParameterPattern::two_spin(), truth);
  // Plain least squares over the six listed betas lands at
  // (1000.2 Hz, 105.7 Hz); well within the 1% / 5% acceptance bands.
  CHECK(res.values_rad_s[0] / kTwoPi == doctest::Approx(1000.22).epsilon(2e-4));
  CHECK(res.values_rad_s[1] / kTwoPi == doctest::Approx(105.72).epsilon(2e-3));
  CHECK(res.error_pct[0] < 1.0);
  CHECK(res.error_pct[1] < 5.0);
  // assignment follows the sorted form order
  CHECK(res.assignment.front().matched_form == "2D");
  CHECK(res.assignment.back().matched_form == "2omega");
}

TEST_CASE("table-driven three-spin estimation reproduces the published values") {
  std::vector<double> phases_deg = {18.03, 19.94, 38.76, 96.43, 116.6, 135.1};
  double tau_b = 100.0 / 110.3e3;  // 2 pi q / omega_L with q = 100
  std::vector<double> phases_rad;
  for (double d : phases_deg) phases_rad.push_back(d * M_PI / 180);
  auto betas = phases_to_betas(spectrum_from_phases(phases_rad), tau_b);
  REQUIRE(betas.size() == 6);

  Eigen::VectorXd truth(3);
  truth << kTwoPi * 475.6, kTwoPi * 238.3, kTwoPi * 352.4;
  MatchResult res = match_parameters(betas, ParameterPattern::three_spin_sm(), truth);
  // Labels are exchangeable from the spectrum alone, so the estimator
  // reports the canonical descending order; the recovered multiset is the
  // published one {475.4, 351.7, 239.2} Hz.
  CHECK(res.values_rad_s[0] / kTwoPi == doctest::Approx(475.4).epsilon(1e-3));
  CHECK(res.values_rad_s[1] / kTwoPi == doctest::Approx(351.7).epsilon(1e-3));
  CHECK(res.values_rad_s[2] / kTwoPi == doctest::Approx(239.2).epsilon(1e-3));
  CHECK(res.error_pct[0] < 0.2);
  CHECK(res.error_pct[1] < 0.4);
  CHECK(res.error_pct[2] < 0.6);
}

TEST_CASE("noiseless forward-constructed betas recover exactly") {
  double w = kTwoPi * 800.0, d = kTwoPi * 90.0;
  std::vector<double> beta_vals = {2 * d, w - 3 * d, w - d, w + d, w + 3 * d, 2 * w};
  std::vector<BetaEstimate> betas;
  for (double v : beta_vals) {
    BetaEstimate b;
    b.beta_rad_s = v;
    betas.push_back(b);
  }
  MatchResult res = match_parameters(betas, ParameterPattern::two_spin());
  CHECK(std::abs(res.values_rad_s[0] - w) < 1e-9);
  CHECK(std::abs(res.values_rad_s[1] - d) < 1e-9);
  CHECK(res.residual_rms_rad_s < 1e-10);

  // three-spin round trip, including the sign-ambiguous difference forms
  double d12 = kTwoPi * 470.0, d13 = kTwoPi * 240.0, d23 = kTwoPi * 350.0;
  std::vector<double> b3 = {(d12 + d13) / 2, (d12 + d23) / 2, (d13 + d23) / 2,
                            std::abs(d12 - d13) / 2, std::abs(d12 - d23) / 2,
                            std::abs(d13 - d23) / 2};
  std::vector<BetaEstimate> betas3;
  for (double v : b3) {
    BetaEstimate b;
    b.beta_rad_s = v;
    betas3.push_back(b);
  }
  MatchResult res3 = match_parameters(betas3, ParameterPattern::three_spin_sm());
  // canonical descending labels: {d12, d23, d13} since d23 > d13 here
  CHECK(std::abs(res3.values_rad_s[0] - d12) < 1e-8);
  CHECK(std::abs(res3.values_rad_s[1] - d23) < 1e-8);
  CHECK(std::abs(res3.values_rad_s[2] - d13) < 1e-8);
  CHECK(res3.residual_rms_rad_s < 1e-9);
}

TEST_CASE("assignment is invariant under input permutations") {
  double w = kTwoPi * 800.0, d = kTwoPi * 90.0;
  std::vector<double> beta_vals = {2 * d, w - 3 * d, w - d, w + d, w + 3 * d, 2 * w};
  std::mt19937_64 rng(5);
  MatchResult ref;
  for (int rep = 0; rep < 6; ++rep) {
    std::shuffle(beta_vals.begin(), beta_vals.end(), rng);
    std::vector<BetaEstimate> betas;
    for (double v : beta_vals) {
      BetaEstimate b;
      b.beta_rad_s = v;
      betas.push_back(b);
    }
    MatchResult res = match_parameters(betas, ParameterPattern::two_spin());
    if (rep == 0) {
      ref = res;
    } else {
      CHECK(std::abs(res.values_rad_s[0] - ref.values_rad_s[0]) < 1e-12);
      CHECK(std::abs(res.values_rad_s[1] - ref.values_rad_s[1]) < 1e-12);
      for (size_t k = 0; k < res.assignment.size(); ++k) {
        CHECK(res.assignment[k].matched_form == ref.assignment[k].matched_form);
      }
    }
  }
}

TEST_CASE("tau_B scale consistency") {
  double w = kTwoPi * 500.0, d = kTwoPi * 60.0;
  std::vector<double> beta_vals = {2 * d, w - 3 * d, w - d, w + d, w + 3 * d, 2 * w};
  for (double tau_b : {2e-4, 4e-4}) {
    std::vector<double> phases;
    for (double v : beta_vals) phases.push_back(v * tau_b);
    auto betas = phases_to_betas(spectrum_from_phases(phases), tau_b);
    MatchResult res = match_parameters(betas, ParameterPattern::two_spin());
    CHECK(std::abs(res.values_rad_s[0] - w) < 1e-6);
    CHECK(std::abs(res.values_rad_s[1] - d) < 1e-6);
  }
}

TEST_CASE("subset of betas still matches (more forms than betas)") {
  double w = kTwoPi * 800.0, d = kTwoPi * 90.0;
  // Drop one beta: five measurements against six candidate forms.
  std::vector<double> beta_vals = {2 * d, w - 3 * d, w - d, w + d, w + 3 * d};
  std::vector<BetaEstimate> betas;
  for (double v : beta_vals) {
    BetaEstimate b;
    b.beta_rad_s = v;
    betas.push_back(b);
  }
  MatchResult res = match_parameters(betas, ParameterPattern::two_spin());
  CHECK(std::abs(res.values_rad_s[0] - w) < 1e-8);
  CHECK(std::abs(res.values_rad_s[1] - d) < 1e-8);
}

TEST_CASE("match_parameters error paths") {
  std::vector<BetaEstimate> one = betas_from_hz({100.0});
  CHECK_THROWS_AS(match_parameters(one, ParameterPattern::two_spin()),
                  std::invalid_argument);
  std::vector<BetaEstimate> seven =
      betas_from_hz({1, 2, 3, 4, 5, 6, 7});
  CHECK_THROWS_AS(match_parameters(seven, ParameterPattern::two_spin()),
                  std::invalid_argument);
  CHECK_THROWS_AS(ParameterPattern::by_name("nope"), std::invalid_argument);
}
