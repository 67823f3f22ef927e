#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace chanspec {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Numerical tolerance policy: tolerances are relative to the Frobenius
/// norm of the input, with an absolute floor of 1e-14.
inline double scaled_tol(double eps, double norm) {
  return std::max(eps * norm, 1e-14);
}

bool all_finite(const CMat& m);
void require_finite(const CMat& m, const char* where);

/// General (non-Hermitian) eigendecomposition with biorthonormal left/right
/// eigenvector pairs.  Right vectors are unit-norm columns of `right`; left
/// vectors are columns of `left`, scaled so that left.adjoint() * right = I.
/// `condition[j] = |l_j^dag r_j| / (||l_j|| ||r_j||)` is the reciprocal
/// eigenvalue condition number; values below ~1e-6 indicate a near-defective
/// (near-EP) eigenvalue.
struct EigPair {
  CVec values;
  CMat right;
  CMat left;
  RVec condition;
};

EigPair eig_general(const CMat& m);

/// Hermitian eigendecomposition: real eigenvalues ascending, orthonormal
/// eigenvectors as columns.  Throws if the input is not Hermitian to
/// relative tolerance 1e-12.
struct HermEig {
  RVec values;
  CMat vectors;
};

HermEig eig_hermitian(const CMat& m);

/// Singular value decomposition m = u * diag(s) * v.adjoint(), with
/// singular values nonnegative and descending.
struct Svd {
  CMat u;
  RVec singular_values;
  CMat v;
};

Svd svd(const CMat& m);

/// Unitary exponential exp(-i h t) of a Hermitian generator, computed by
/// spectral decomposition.
CMat expm_unitary(const CMat& h, double t);

/// Minimum-norm least-squares solution of a x = b (a square or tall) via
/// SVD with singular-value cutoff 1e-12 * s_max.
CMat lstsq(const CMat& a, const CMat& b);

}  // namespace chanspec
