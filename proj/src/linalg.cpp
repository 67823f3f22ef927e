#include "chanspec/linalg.hpp"

namespace chanspec {

bool all_finite(const CMat& m) {
  return m.allFinite();
}

void require_finite(const CMat& m, const char* where) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(where) + ": non-finite entries");
  }
}

EigPair eig_general(const CMat& m) {
  require_finite(m, "eig_general");
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eig_general: matrix must be square");
  }
  Eigen::ComplexEigenSolver<CMat> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_general: eigensolver did not converge");
  }
  EigPair out;
  out.values = solver.eigenvalues();
  out.right = solver.eigenvectors();
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    out.right.col(j).normalize();
  }
  // Left vectors from the inverse: with right.inverse() * right = I, the
  // columns of (right^{-1})^dag satisfy l_j^dag m = lambda_j l_j^dag and
  // l_i^dag r_j = delta_ij by construction.
  CMat inv = out.right.partialPivLu().solve(CMat::Identity(n, n));
  out.left = inv.adjoint();
  out.condition.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double ln = out.left.col(j).norm();
    double rn = out.right.col(j).norm();
    double ip = std::abs(out.left.col(j).dot(out.right.col(j)));
    out.condition[j] = (ln > 0 && rn > 0) ? ip / (ln * rn) : 0.0;
  }
  return out;
}

HermEig eig_hermitian(const CMat& m) {
  require_finite(m, "eig_hermitian");
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eig_hermitian: matrix must be square");
  }
  double dev = (m - m.adjoint()).norm();
  if (dev > scaled_tol(1e-12, m.norm())) {
    throw std::invalid_argument("eig_hermitian: matrix not Hermitian within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<CMat> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian: eigensolver did not converge");
  }
  return HermEig{solver.eigenvalues(), solver.eigenvectors()};
}

Svd svd(const CMat& m) {
  require_finite(m, "svd");
  Eigen::JacobiSVD<CMat> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("svd: decomposition did not converge");
  }
  return Svd{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

CMat expm_unitary(const CMat& h, double t) {
  HermEig eig = eig_hermitian(h);
  const Eigen::Index n = h.rows();
  CVec phases(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    phases[j] = std::exp(Complex(0.0, -eig.values[j] * t));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

CMat lstsq(const CMat& a, const CMat& b) {
  require_finite(a, "lstsq");
  require_finite(b, "lstsq");
  if (a.size() == 0 || b.size() == 0) {
    throw std::invalid_argument("lstsq: empty system");
  }
  if (a.rows() < a.cols()) {
    throw std::invalid_argument("lstsq: system must be square or overdetermined");
  }
  if (a.rows() != b.rows()) {
    throw std::invalid_argument("lstsq: row count mismatch");
  }
  Svd dec = svd(a);
  const double cutoff = 1e-12 * dec.singular_values[0];
  const Eigen::Index k = dec.singular_values.size();
  CMat ut_b = dec.u.adjoint() * b;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (dec.singular_values[j] > cutoff) {
      ut_b.row(j) /= dec.singular_values[j];
    } else {
      ut_b.row(j).setZero();
    }
  }
  return dec.v * ut_b;
}

}  // namespace chanspec
