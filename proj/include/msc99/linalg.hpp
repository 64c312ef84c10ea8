#pragma once

#include <Eigen/Dense>
#include <complex>

// Small dense-linear-algebra layer on top of LAPACK, sized for desk-scale
// Hilbert spaces (dimension <= ~4096). Everything is column-major complex
// double. The distinguishability code paths route through hermitian_eig;
// for large low-rank inputs callers first compress onto the joint support
// returned by psd_range/joint_range (exact for PSD matrices, and much
// cheaper than a full 4096-dim eigendecomposition on one core).

namespace msc99::linalg {

using Cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Dimension above which spectral validity checks switch from a full
// eigendecomposition to a Lanczos estimate.
inline constexpr int kDenseCheckLimit = 512;

// Dimension above which trace-norm/fidelity computations compress onto the
// joint support first.
inline constexpr int kSupportCompressLimit = 256;

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // column k pairs with values[k]
};

// Full eigendecomposition of a Hermitian matrix (LAPACK zheevd).
Eigensystem hermitian_eig(const Matrix& m);

// Eigenvalues only, ascending.
RealVector hermitian_eigenvalues(const Matrix& m);

// Square root of a positive semidefinite matrix. Eigenvalues in
// [-1e-10, 0) are clamped to 0; more negative ones throw.
Matrix psd_sqrt(const Matrix& m);

// Pivoted Cholesky factor F with m ~= F F^H (LAPACK zpstrf), F is
// n x rank; rank truncation at LAPACK's default pivot threshold.
Matrix psd_factor(const Matrix& m);

// Orthonormal basis (columns) of the numerical column space of a PSD
// matrix, via pivoted Cholesky (LAPACK zpstrf) and a QR of the factor.
Matrix psd_range(const Matrix& m);

// Orthonormal basis of range(a) + range(b), a and b PSD.
Matrix joint_range(const Matrix& a, const Matrix& b);

// Smallest eigenvalue of a Hermitian matrix. Exact up to kDenseCheckLimit;
// above it a Lanczos lower-end Ritz estimate (never below the true
// minimum, so validity checks using it cannot falsely reject).
double min_eigenvalue(const Matrix& m);

struct Svd {
  Matrix u;
  RealVector singular_values;  // descending
  Matrix v;  // m = u * singular_values.asDiagonal() * v.adjoint()
};

// Full SVD (LAPACK zgesdd).
Svd svd(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

}  // namespace msc99::linalg
