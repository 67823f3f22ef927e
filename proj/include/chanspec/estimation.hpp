#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chanspec/specest.hpp"

namespace chanspec {

/// One angular frequency inferred from an estimated pole phase,
/// beta = |arg(lambda)| / tau_B, sign fixed positive by convention.
struct BetaEstimate {
  double beta_rad_s = 0.0;
  double phase_rad = 0.0;  // |arg lambda| in [0, pi]
  bool aliased = false;    // |arg lambda| > pi - 0.05
  int pole_index = -1;
  double amplitude = 0.0;
};

/// Converts oscillation-pole phases to angular frequencies.  Real poles
/// (zero phase, fixed points) are excluded; of each conjugate pair only the
/// positive-phase member is reported.
std::vector<BetaEstimate> phases_to_betas(const EstimatedSpectrum& spec, double tau_b_s);

/// A candidate linear form beta = coeffs . unknowns.  Forms whose sign is
/// not fixed by the physical constraints (differences of couplings) carry
/// allow_sign_flip, because measured betas are magnitudes.
struct LinearForm {
  std::string name;
  Eigen::VectorXd coeffs;
  bool allow_sign_flip = false;
};

struct ParameterPattern {
  std::vector<std::string> unknowns;
  std::vector<LinearForm> forms;
  /// Set when the form set is invariant under permutations of the unknowns
  /// (spectral data cannot distinguish the labels); the estimator then
  /// reports the canonical descending labeling.
  bool exchangeable_unknowns = false;

  /// Two-spin pattern over (omega, D): {2D, w-3D, w-D, w+D, w+3D, 2w}.
  /// Assumes the paper's regime omega > 3D > 0, so all forms are positive.
  static ParameterPattern two_spin();
  /// Three-spin pattern over (D12, D13, D23): pairwise sums and
  /// (sign-ambiguous) differences, each halved.  Unknowns exchangeable.
  static ParameterPattern three_spin_sm();
  static ParameterPattern by_name(const std::string& name);
};

struct Assignment {
  double beta_rad_s = 0.0;
  std::string matched_form;
  double predicted_rad_s = 0.0;
};

struct MatchResult {
  Eigen::VectorXd values_rad_s;
  std::vector<Assignment> assignment;
  double residual_rms_rad_s = 0.0;
  std::vector<double> error_pct;  // vs truth, when provided
};

/// Exhaustive enumeration of injective assignments of measured betas to
/// candidate forms (with sign choices for ambiguous forms), solving a
/// linear least-squares problem per assignment and keeping the
/// minimum-residual solution subject to positivity of the unknowns.
MatchResult match_parameters(const std::vector<BetaEstimate>& betas,
                             const ParameterPattern& pattern,
                             const std::optional<Eigen::VectorXd>& truth_rad_s = std::nullopt);

}  // namespace chanspec
