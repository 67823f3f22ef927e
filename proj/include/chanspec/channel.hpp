#pragma once

#include <string>
#include <vector>

#include "chanspec/linalg.hpp"

namespace chanspec {

/// Kraus representation of a channel: a set of d x d operators M_i with
/// sum_i M_i^dag M_i = I (trace preservation).
struct KrausSet {
  Eigen::Index dim = 0;
  std::vector<CMat> operators;

  double trace_preserving_residual() const;
  /// Validates dimensions, finiteness and trace preservation (1e-10).
  static KrausSet create(std::vector<CMat> ops, bool check_tp = true);
};

/// A d^2 x d^2 matrix acting on vectorized operators.
struct SuperopMatrix {
  Eigen::Index d = 0;
  CMat mat;
};

/// Row-major vectorization |R>> = sum_mn R_mn |m> (x) |n>, so that
/// <<L|R>> = Tr(L^dag R) and (X (x) Y)|R>> = |X R Y^T>>.
CVec vectorize(const CMat& op);
CMat unvectorize(const CVec& v);

SuperopMatrix natural_representation(const KrausSet& k);
SuperopMatrix dual_representation(const KrausSet& k);

struct CptpReport {
  double trace_preserving_residual = 0.0;
  double choi_min_eigenvalue = 0.0;
  bool pass = false;
};

/// Checks trace preservation and complete positivity (via the Choi matrix
/// J = sum_ij |i><j| (x) Phi(|i><j|)).
CptpReport verify_cptp(const KrausSet& k);

enum class EigClass { Real, ConjugatePairMember };

/// Spectral decomposition of a superoperator with eigenvalue classification
/// into real values and conjugate pairs, biorthonormal left/right vectors,
/// and conditioning metadata.  When min_conditioning falls below 1e-6 the
/// spectrum is flagged near-defective and biorthonormalization is skipped.
struct ChannelSpectrum {
  Eigen::VectorXcd values;
  CMat right;  // columns
  CMat left;   // columns; left.adjoint()*right = I when not near-defective
  std::vector<EigClass> classification;
  std::vector<int> partner;  // index of conjugate partner, -1 for real
  std::vector<int> unmatched;  // complex eigenvalues without a partner
  std::vector<int> fixed_point_indices;  // |lambda - 1| <= 1e-8
  double min_conditioning = 0.0;
  bool near_defective = false;
  double norm = 0.0;  // Frobenius norm of the decomposed superoperator
};

ChannelSpectrum spectral_decompose(const SuperopMatrix& s);

struct MetricResult {
  CMat eta;
  double hermiticity_residual = 0.0;   // ||eta - eta^dag|| / ||eta||
  double intertwining_residual = 0.0;  // ||eta Phi eta^-1 - Phi^dag|| / ||Phi||
  double condition_number = 0.0;
};

/// Builds the Hermitian metric eta = sum_real a_j |L_j><L_j| +
/// sum_pairs |L_k><L_partner(k)| and verifies eta Phi eta^-1 = Phi^dag.
/// `signs` gives a_j in {-1,+1} per real eigenvalue index; defaults to +1.
MetricResult build_metric(const ChannelSpectrum& cs, const SuperopMatrix& s,
                          const std::vector<int>& signs = {});

/// Residual of the swap-time symmetry ||S conj(s) S - s|| / ||s|| where
/// S|ij>> = |ji>>.  Vanishes for any natural representation of a Kraus set.
double swap_time_residual(const SuperopMatrix& s);

struct PairingReport {
  bool pass = false;
  std::vector<int> unmatched;
  std::vector<std::pair<int, int>> pairs;
  int real_count = 0;
};

PairingReport classify_real_or_pairs(const ChannelSpectrum& cs);

/// JSON serialization: {"dim": d, "operators": [[[re, im], ...], ...]} with
/// each operator a row-major flat list of [re, im] pairs.
KrausSet load_kraus_json(const std::string& path);
void save_kraus_json(const KrausSet& k, const std::string& path);
KrausSet kraus_from_json_text(const std::string& text);
std::string kraus_to_json_text(const KrausSet& k);

}  // namespace chanspec
