#include "msc99/linalg.hpp"

#include <lapacke.h>

#include <random>
#include <stdexcept>
#include <vector>

namespace msc99::linalg {

namespace {

lapack_complex_double* lp(Matrix& m) {
  return reinterpret_cast<lapack_complex_double*>(m.data());
}

void require_square(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
}

}  // namespace

Eigensystem hermitian_eig(const Matrix& m) {
  require_square(m);
  const lapack_int n = static_cast<lapack_int>(m.rows());
  Eigensystem out;
  out.vectors = m;
  out.values.resize(n);
  if (n == 0) return out;
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                   lp(out.vectors), n, out.values.data());
  if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
  return out;
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  require_square(m);
  const lapack_int n = static_cast<lapack_int>(m.rows());
  Matrix a = m;
  RealVector w(n);
  if (n == 0) return w;
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, lp(a), n, w.data());
  if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
  return w;
}

Matrix psd_sqrt(const Matrix& m) {
  Eigensystem es = hermitian_eig(m);
  RealVector w = es.values;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] < -1e-10)
      throw std::invalid_argument("psd_sqrt: matrix has eigenvalue " + std::to_string(w[i]));
    w[i] = w[i] > 0.0 ? std::sqrt(w[i]) : 0.0;
  }
  return es.vectors * w.asDiagonal() * es.vectors.adjoint();
}

namespace {

Matrix orthonormal_columns(const Matrix& f) {
  if (f.cols() == 0) return Matrix::Zero(f.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(f);
  qr.setThreshold(1e-12);
  const Eigen::Index r = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(f.rows(), r);
  return q;
}

}  // namespace

Matrix psd_factor(const Matrix& m) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  Matrix a = m;
  std::vector<lapack_int> piv(std::max<lapack_int>(n, 1));
  lapack_int rank = 0;
  // tol < 0 selects LAPACK's default n*eps*max(diag) stopping threshold.
  lapack_int info = LAPACKE_zpstrf(LAPACK_COL_MAJOR, 'L', n, lp(a), n,
                                   piv.data(), &rank, -1.0);
  if (info < 0) throw std::runtime_error("zpstrf failed, info=" + std::to_string(info));
  // info > 0 just means exact rank deficiency was detected; rank is valid.
  Matrix f = Matrix::Zero(n, rank);
  for (lapack_int i = 0; i < n; ++i) {
    const lapack_int row = piv[i] - 1;
    for (lapack_int j = 0; j < rank && j <= i; ++j) f(row, j) = a(i, j);
  }
  return f;
}

Matrix psd_range(const Matrix& m) { return orthonormal_columns(psd_factor(m)); }

Matrix joint_range(const Matrix& a, const Matrix& b) {
  Matrix fa = psd_factor(a);
  Matrix fb = psd_factor(b);
  Matrix c(a.rows(), fa.cols() + fb.cols());
  c << fa, fb;
  return orthonormal_columns(c);
}

double min_eigenvalue(const Matrix& m) {
  require_square(m);
  const Eigen::Index n = m.rows();
  if (n <= kDenseCheckLimit) return hermitian_eigenvalues(m).minCoeff();

  // Lanczos with full reorthogonalization; deterministic start vector.
  const int iters = static_cast<int>(std::min<Eigen::Index>(n, 32));
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Cx(gauss(gen), gauss(gen));
  v.normalize();

  std::vector<Vector> basis;
  basis.reserve(iters);
  Eigen::VectorXd alpha(iters), beta(iters);
  int k = 0;
  Vector w;
  for (; k < iters; ++k) {
    basis.push_back(v);
    w = m.selfadjointView<Eigen::Lower>() * v;
    alpha[k] = w.dot(v).real();
    for (const Vector& u : basis) w -= u.dot(w) * u;
    for (const Vector& u : basis) w -= u.dot(w) * u;  // second pass
    const double nw = w.norm();
    beta[k] = nw;
    if (nw < 1e-13) { ++k; break; }
    v = w / nw;
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Svd svd(const Matrix& m) {
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  Matrix a = m;
  Svd out;
  out.u.resize(rows, rows);
  out.v.resize(cols, cols);
  out.singular_values.resize(std::min(rows, cols));
  Matrix vt(cols, cols);
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'A', rows, cols, lp(a), rows,
                                   out.singular_values.data(), lp(out.u), rows,
                                   lp(vt), cols);
  if (info != 0) throw std::runtime_error("zgesdd failed, info=" + std::to_string(info));
  out.v = vt.adjoint();
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

}  // namespace msc99::linalg
