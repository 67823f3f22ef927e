#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chanspec/trajectory.hpp"

namespace chanspec {

/// Matrix-pencil configuration.  `pencil_l` is the Hankel column count L
/// (0 selects the default floor(N/3)); the model order is either fixed or
/// chosen by a singular-value ratio threshold (noiseless default 1e-8,
/// override for sampled data).
struct PencilConfig {
  int pencil_l = 0;
  int fixed_order = 0;         // > 0 takes precedence
  double sv_ratio = 1e-8;      // relative to the largest singular value
  std::optional<double> noise_floor;  // absolute singular-value floor
};

struct EstimatedPole {
  Complex pole;
  Complex amplitude;
  double phase_rad = 0.0;
  double phase_deg = 0.0;
  double magnitude = 0.0;
};

struct EstimatedSpectrum {
  std::vector<EstimatedPole> poles;  // deduplicated, conjugate-symmetrized
  double residual_rms = 0.0;
  int model_order = 0;
  std::vector<Complex> discarded;  // |pole| > 1.05, logged as noise artifacts
};

/// Pole extraction by the matrix pencil method: Hankel data matrix, SVD
/// filtering to the model order, and eigenvalues of pinv(Y1) Y2 restricted
/// to the signal subspace.  Amplitudes by Vandermonde least squares against
/// y_m = sum_j c_j lambda_j^{m-1}.
EstimatedSpectrum matrix_pencil(const FrequencySeries& signal, const PencilConfig& cfg);

struct AmplitudeFit {
  std::vector<Complex> amplitudes;
  double residual_rms = 0.0;
};

/// Least-squares amplitudes for a fixed pole set (poles pairwise distinct).
AmplitudeFit ls_amplitudes(const FrequencySeries& signal, const std::vector<Complex>& poles);

struct DftSpectrum {
  std::vector<double> frequency;  // cycles per sample, in [0, 0.5]
  std::vector<double> magnitude;
  std::vector<double> peak_frequencies;
};

/// Plain DFT magnitude spectrum; visualization / coarse cross-check only.
DftSpectrum dft_spectrum(const FrequencySeries& signal);

enum class EpModelKind { TwoRealExponentials, ConjugatePairOscillation, SecondOrderEP };

struct EpModelFit {
  EpModelKind selected;
  double residual_rms = 0.0;
  // TwoRealExponentials: y = a0 + a1 r1^m + a2 r2^m
  double r1 = 0.0, r2 = 0.0;
  // ConjugatePairOscillation: y = a0 + rho^m (p cos m phi + q sin m phi)
  double rho = 0.0, pair_phase = 0.0;
  // SecondOrderEP: y = a0 + (b + c m) lambda^m
  double lambda = 0.0;
  double residuals[3] = {0, 0, 0};  // per model, same order as EpModelKind
};

/// Fits the three near-EP signal models (two real exponentials, damped
/// oscillation, second-order-EP polynomial-exponential) by nonlinear least
/// squares seeded from the matrix pencil, and selects the best with a
/// complexity penalty.  Coalescent fits (|r1-r2| or |phi| below 0.02) are
/// reclassified as SecondOrderEP.
EpModelFit ep_model_fit(const FrequencySeries& signal);

}  // namespace chanspec
