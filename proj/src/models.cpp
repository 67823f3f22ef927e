#include "chanspec/models.hpp"

#include <cmath>

namespace chanspec {

namespace {

CMat pauli(char axis) {
  CMat m(2, 2);
  switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0); break;
    case 'z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli: axis must be x, y or z");
  }
  return m;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

CMat spin_operator(int sites, int site, char axis) {
  if (site < 0 || site >= sites) {
    throw std::invalid_argument("spin_operator: site out of range");
  }
  CMat out = CMat::Identity(1, 1);
  for (int k = 0; k < sites; ++k) {
    out = kron(out, k == site ? CMat(0.5 * pauli(axis)) : CMat(CMat::Identity(2, 2)));
  }
  return out;
}

HamiltonianSpec build_hamiltonian(int sites, std::vector<PauliTerm> terms) {
  if (sites <= 0) {
    throw std::invalid_argument("build_hamiltonian: need at least one site");
  }
  const Eigen::Index dim = Eigen::Index(1) << sites;
  CMat acc = CMat::Zero(dim, dim);
  for (const PauliTerm& t : terms) {
    if (t.sites.size() != t.axes.size()) {
      throw std::invalid_argument("build_hamiltonian: sites/axes arity mismatch");
    }
    CMat op = CMat::Identity(dim, dim);
    for (size_t k = 0; k < t.sites.size(); ++k) {
      op = op * spin_operator(sites, t.sites[k], t.axes[k]);
    }
    acc += t.coeff_rad_s * op;
  }
  double herm_dev = (acc - acc.adjoint()).norm();
  if (herm_dev > scaled_tol(1e-12, acc.norm())) {
    throw std::invalid_argument("build_hamiltonian: assembled matrix not Hermitian");
  }
  acc = 0.5 * (acc + acc.adjoint());
  return HamiltonianSpec{sites, dim, std::move(terms), std::move(acc)};
}

double RimParams::weak_measurement_indicator(const HamiltonianSpec& a) const {
  HermEig eig = eig_hermitian(a.assembled);
  double opnorm = std::max(std::abs(eig.values.minCoeff()), std::abs(eig.values.maxCoeff()));
  return tau_a_s * tau_a_s * opnorm * opnorm / 3.0;
}

UnitaryChannel unitary_channel(const HamiltonianSpec& b, double tau_b_s) {
  if (tau_b_s <= 0) {
    throw std::invalid_argument("unitary_channel: tau_B must be positive");
  }
  CMat v = expm_unitary(b.assembled, tau_b_s);
  KrausSet k = KrausSet::create({v});
  SuperopMatrix sup = natural_representation(k);
  return UnitaryChannel{std::move(k), std::move(sup), tau_b_s};
}

KrausSet rim_channel(const HamiltonianSpec& a, const RimParams& p) {
  if (p.tau_a_s <= 0) {
    throw std::invalid_argument("rim_channel: tau_A must be positive");
  }
  CMat h0 = a.assembled;
  CMat h1 = CMat(-a.assembled);
  if (p.include_free_b) {
    if (!p.b_during_rim) {
      throw std::invalid_argument("rim_channel: include_free_b set but no B given");
    }
    h0 += p.b_during_rim->assembled;
    h1 += p.b_during_rim->assembled;
  }
  CMat u0 = expm_unitary(h0, p.tau_a_s);
  CMat u1 = expm_unitary(h1, p.tau_a_s);
  Complex phase = std::exp(Complex(0.0, p.phi_rad));
  CMat m0 = 0.5 * (u0 - phase * u1);
  CMat m1 = 0.5 * (u0 + phase * u1);
  return KrausSet::create({m0, m1});
}

ConcatenatedChannel concatenate(const KrausSet& rim, const UnitaryChannel& uni) {
  if (rim.dim != uni.kraus.dim) {
    throw std::invalid_argument("concatenate: dimension mismatch");
  }
  const CMat& v = uni.kraus.operators.front();
  std::vector<CMat> ops;
  ops.reserve(rim.operators.size());
  for (const CMat& m : rim.operators) {
    ops.push_back(m * v);
  }
  KrausSet k = KrausSet::create(std::move(ops));
  SuperopMatrix sup = natural_representation(k);
  return ConcatenatedChannel{std::move(k), std::move(sup), uni.tau_b_s};
}

SuperopMatrix commutator_superop(const HamiltonianSpec& a) {
  const Eigen::Index d = a.dim;
  CMat id = CMat::Identity(d, d);
  CMat c = kron(a.assembled, id) - kron(id, a.assembled.transpose());
  return SuperopMatrix{d, std::move(c)};
}

PerturbativeSpectrum perturbative_spectrum(const HamiltonianSpec& a,
                                           const HamiltonianSpec& b,
                                           double tau_a_s, double tau_b_s) {
  HermEig beig = eig_hermitian(b.assembled);
  const Eigen::Index d = b.dim;
  // Couplings in the eigenbasis of B.
  CMat at = beig.vectors.adjoint() * a.assembled * beig.vectors;
  CMat at2 = at * at;

  // Degeneracy precondition: pairwise distinct nonzero gaps beta_ij.
  constexpr double kDegenerateTol = 1e-8;  // rad/s
  std::vector<double> betas;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j) betas.push_back(beig.values[i] - beig.values[j]);
    }
  }
  for (size_t p = 0; p < betas.size(); ++p) {
    for (size_t q = p + 1; q < betas.size(); ++q) {
      if (std::abs(betas[p] - betas[q]) <= kDegenerateTol) {
        throw std::invalid_argument(
            "perturbative_spectrum: degenerate off-diagonal beta gaps at indices " +
            std::to_string(p) + "," + std::to_string(q));
      }
    }
  }

  PerturbativeSpectrum out;
  out.off_diagonal.resize(d * (d - 1));
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      double beta = beig.values[i] - beig.values[j];
      Complex v = std::exp(Complex(0.0, -beta * tau_b_s));
      double c2 = (at2(i, i) + at2(j, j)).real() - 2.0 * at(i, i).real() * at(j, j).real();
      out.off_diagonal[idx++] = v * (1.0 - 0.5 * tau_a_s * tau_a_s * c2);
    }
  }

  // Degenerate (fixed-point) block: Laplacian of |a_ij|^2 weights.
  Eigen::MatrixXd w = at.cwiseAbs2();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      lap(i, j) = -w(i, j);
      lap(i, i) += w(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lsolver(lap);
  out.laplacian_eigenvalues = lsolver.eigenvalues();

  out.all.resize(d * d);
  out.all.head(d * (d - 1)) = out.off_diagonal;
  for (Eigen::Index i = 0; i < d; ++i) {
    out.all[d * (d - 1) + i] = 1.0 - tau_a_s * tau_a_s * out.laplacian_eigenvalues[i];
  }
  return out;
}

Example1Spectrum example1_analytic(double mu, double nu) {
  Example1Spectrum out;
  double c = std::cos(mu / 2), c2 = c * c;
  double t = std::tan(mu / 2);
  out.discriminant = t * t * t * t - std::sin(nu) * std::sin(nu);
  Complex root = std::sqrt(Complex(out.discriminant, 0.0));
  out.values[0] = 1.0;
  out.values[1] = std::cos(mu);
  out.values[2] = c2 * (std::cos(nu) + root);
  out.values[3] = c2 * (std::cos(nu) - root);
  return out;
}

double example1_ep_mu(double nu) {
  return 2.0 * std::atan(std::sqrt(std::abs(std::sin(nu))));
}

std::pair<HamiltonianSpec, HamiltonianSpec> spin_cluster_hamiltonians(
    ClusterKind kind, const SpinClusterParams& params) {
  const int n = kind == ClusterKind::TwoSpinMain ? 2 : 3;
  if (params.h_rad_s.size() != static_cast<size_t>(n)) {
    throw std::invalid_argument("spin_cluster_hamiltonians: need one h per spin");
  }
  if (!params.h_dirs.empty() && params.h_dirs.size() != static_cast<size_t>(n)) {
    throw std::invalid_argument("spin_cluster_hamiltonians: need one direction per spin");
  }
  std::vector<PauliTerm> a_terms;
  for (int k = 0; k < n; ++k) {
    std::array<double, 3> dir =
        params.h_dirs.empty() ? std::array<double, 3>{1, 0, 0} : params.h_dirs[k];
    double norm = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    if (norm <= 0) {
      throw std::invalid_argument("spin_cluster_hamiltonians: zero direction");
    }
    const char axes[3] = {'x', 'y', 'z'};
    for (int ax = 0; ax < 3; ++ax) {
      if (dir[ax] == 0.0) continue;
      a_terms.push_back(PauliTerm{params.h_rad_s[k] * dir[ax] / norm,
                                  {k}, std::string(1, axes[ax])});
    }
  }
  HamiltonianSpec a = build_hamiltonian(n, std::move(a_terms));

  std::vector<PauliTerm> b_terms;
  if (kind == ClusterKind::TwoSpinMain) {
    if (params.d_rad_s.size() != 1) {
      throw std::invalid_argument("two-spin model: need exactly one D");
    }
    double d = params.d_rad_s[0];
    for (int k = 0; k < 2; ++k) {
      b_terms.push_back(PauliTerm{params.omega_rad_s, {k}, "z"});
    }
    // flip-flop I1+ I2- + I1- I2+ = 2 (I1x I2x + I1y I2y)
    b_terms.push_back(PauliTerm{2.0 * d, {0, 1}, "xx"});
    b_terms.push_back(PauliTerm{2.0 * d, {0, 1}, "yy"});
    b_terms.push_back(PauliTerm{-4.0 * d, {0, 1}, "zz"});
  } else {
    if (params.d_rad_s.size() != 3) {
      throw std::invalid_argument("three-spin model: need D12, D13, D23");
    }
    for (int k = 0; k < 3; ++k) {
      b_terms.push_back(PauliTerm{params.omega_rad_s, {k}, "z"});
    }
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int p = 0; p < 3; ++p) {
      b_terms.push_back(PauliTerm{params.d_rad_s[p], {pairs[p][0], pairs[p][1]}, "zz"});
    }
  }
  HamiltonianSpec b = build_hamiltonian(n, std::move(b_terms));
  return {std::move(a), std::move(b)};
}

}  // namespace chanspec
