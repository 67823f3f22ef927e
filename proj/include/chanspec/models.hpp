#pragma once

#include <array>
#include <optional>
#include <utility>

#include "chanspec/channel.hpp"

namespace chanspec {

/// One product term of a spin-1/2 cluster Hamiltonian: coefficient (rad/s)
/// times a product of spin operators I^axis = sigma^axis / 2 on the listed
/// sites.  Sites are indexed in the declared order of the cluster.
struct PauliTerm {
  double coeff_rad_s = 0.0;
  std::vector<int> sites;
  std::string axes;  // one of 'x','y','z' per site
};

struct HamiltonianSpec {
  int sites = 0;
  Eigen::Index dim = 0;
  std::vector<PauliTerm> terms;
  CMat assembled;
};

HamiltonianSpec build_hamiltonian(int sites, std::vector<PauliTerm> terms);

/// Single-site spin operator sigma^axis/2 embedded in a 2^sites space.
CMat spin_operator(int sites, int site, char axis);

/// Ramsey-interferometry measurement parameters.  The weak-measurement
/// validity indicator tau_A^2 ||A||^2 / 3 (operator 2-norm) should be << 1.
struct RimParams {
  double tau_a_s = 0.0;
  double phi_rad = 1.5707963267948966;  // pi/2
  bool include_free_b = false;
  std::optional<HamiltonianSpec> b_during_rim;

  double weak_measurement_indicator(const HamiltonianSpec& a) const;
};

struct UnitaryChannel {
  KrausSet kraus;
  SuperopMatrix superop;
  double tau_b_s = 0.0;
};

/// Free-evolution channel rho -> V rho V^dag with V = exp(-i B tau_B).
UnitaryChannel unitary_channel(const HamiltonianSpec& b, double tau_b_s);

/// Weak-measurement channel induced by one RIM cycle: two Kraus operators
/// M_alpha = [U_0 - (-1)^alpha e^{i phi} U_1] / 2 with
/// U_alpha = exp(-i (-1)^alpha A tau_A)  (plus B if include_free_b).
KrausSet rim_channel(const HamiltonianSpec& a, const RimParams& p);

struct ConcatenatedChannel {
  KrausSet kraus;        // {M_0 V, M_1 V}
  SuperopMatrix superop; // Phi_A Phi_B
  double tau_b_s = 0.0;
};

ConcatenatedChannel concatenate(const KrausSet& rim, const UnitaryChannel& uni);

/// Commutator superoperator C_A = A (x) I - I (x) A^T, so that
/// C_A |Y>> = |[A, Y]>>.
SuperopMatrix commutator_superop(const HamiltonianSpec& a);

/// First-order perturbative spectrum of the concatenated channel.
/// Off-diagonal modes: lambda_ij = v_ij (1 - tau_A^2/2 <<ij|C_A^2|ij>>) in
/// the eigenbasis of B.  Fixed-subspace modes: lambda_ii = 1 - tau_A^2 l_i
/// from the graph-Laplacian of |a_ij|^2 weights (l_1 = 0 guaranteed).
struct PerturbativeSpectrum {
  Eigen::VectorXcd off_diagonal;       // d(d-1) modes
  Eigen::VectorXd laplacian_eigenvalues;  // d modes, ascending
  Eigen::VectorXcd all;                // concatenated, size d^2
};

PerturbativeSpectrum perturbative_spectrum(const HamiltonianSpec& a,
                                           const HamiltonianSpec& b,
                                           double tau_a_s, double tau_b_s);

/// Closed-form spectrum of the single-target-spin channel:
/// {1, cos(mu), cos^2(mu/2) [cos(nu) +- sqrt(tan^4(mu/2) - sin^2(nu))]}.
/// The discriminant tan^4(mu/2) - sin^2(nu) changes sign across the EP line.
struct Example1Spectrum {
  std::array<Complex, 4> values;
  double discriminant = 0.0;
};

Example1Spectrum example1_analytic(double mu, double nu);

/// Location of the exceptional point in mu at fixed nu, from the
/// discriminant root tan^2(mu/2) = |sin(nu)|.
double example1_ep_mu(double nu);

enum class ClusterKind { TwoSpinMain, ThreeSpinSM };

/// Parameters of the spin-cluster models.  Hyperfine couplings are given as
/// magnitude (rad/s) plus unit direction per spin.
struct SpinClusterParams {
  std::vector<double> h_rad_s;
  std::vector<std::array<double, 3>> h_dirs;  // defaults to x when empty
  double omega_rad_s = 0.0;                   // Larmor (two-spin) / omega_L (three-spin)
  std::vector<double> d_rad_s;                // {D} or {D12, D13, D23}
};

/// Builds (A, B) for the named cluster model:
///   TwoSpinMain:  B = omega (I1z + I2z) + D (I1+ I2- + I1- I2+ - 4 I1z I2z)
///   ThreeSpinSM:  B = omega_L sum Iz + sum_{j<k} D_jk Iz^j Iz^k
/// with A = sum_k h_k (d_k . I_k) in both cases.
std::pair<HamiltonianSpec, HamiltonianSpec> spin_cluster_hamiltonians(
    ClusterKind kind, const SpinClusterParams& params);

}  // namespace chanspec
