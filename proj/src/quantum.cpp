#include "msc99/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msc99::quantum {

namespace {

int checked_dim_product(const std::vector<int>& dims, Eigen::Index size) {
  if (dims.empty()) throw std::invalid_argument("dims must be non-empty");
  long long prod = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("subsystem dimensions must be >= 1");
    prod *= d;
  }
  if (prod != static_cast<long long>(size))
    throw std::invalid_argument("product of dims does not match amplitude count");
  return static_cast<int>(prod);
}

// Strides for row-major multi-indices (first factor most significant,
// consistent with kron ordering).
std::vector<long long> strides_of(const std::vector<int>& dims) {
  std::vector<long long> s(dims.size());
  long long acc = 1;
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    s[k] = acc;
    acc *= dims[k];
  }
  return s;
}

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
}

bool is_projector(const Matrix& e) {
  return (e * e - e).cwiseAbs().maxCoeff() < 1e-10;
}

}  // namespace

StateVector::StateVector(Vector a, std::vector<int> d)
    : amplitudes(std::move(a)), dims(std::move(d)) {
  checked_dim_product(dims, amplitudes.size());
  if (std::abs(amplitudes.squaredNorm() - 1.0) > kNormTol)
    throw std::invalid_argument("state vector is not normalized");
}

DensityMatrix::DensityMatrix(Matrix e, std::vector<int> d)
    : entries(std::move(e)), dims(std::move(d)) {
  if (entries.rows() != entries.cols())
    throw std::invalid_argument("density matrix must be square");
  checked_dim_product(dims, entries.rows());
  if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > kNormTol)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(entries.trace().real() - 1.0) > kNormTol ||
      std::abs(entries.trace().imag()) > kNormTol)
    throw std::invalid_argument("density matrix trace is not 1");
  if (linalg::min_eigenvalue(entries) < -kPsdTol)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes * psi.amplitudes.adjoint(), psi.dims);
}

Povm::Povm(std::vector<PovmElement> elems) : elements(std::move(elems)) {
  if (elements.empty()) throw std::invalid_argument("POVM must have elements");
  const Eigen::Index n = elements.front().op.rows();
  Matrix sum = Matrix::Zero(n, n);
  for (const PovmElement& e : elements) {
    if (e.op.rows() != n || e.op.cols() != n)
      throw std::invalid_argument("POVM elements must share one dimension");
    if ((e.op - e.op.adjoint()).cwiseAbs().maxCoeff() > kNormTol)
      throw std::invalid_argument("POVM element is not Hermitian");
    if (linalg::min_eigenvalue(e.op) < -kPsdTol)
      throw std::invalid_argument("POVM element is not positive semidefinite");
    sum += e.op;
  }
  if ((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kPovmSumTol)
    throw std::invalid_argument("POVM elements do not sum to identity");
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return StateVector(linalg::kron(a.amplitudes, b.amplitudes), std::move(dims));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return DensityMatrix(linalg::kron(a.entries, b.entries), std::move(dims));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("keep set must be non-empty");
  std::vector<int> k = keep;
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  const int nfac = static_cast<int>(rho.dims.size());
  for (int idx : k)
    if (idx < 0 || idx >= nfac) throw std::invalid_argument("keep index out of range");

  const auto strides = strides_of(rho.dims);
  std::vector<int> traced;
  for (int i = 0; i < nfac; ++i)
    if (!std::binary_search(k.begin(), k.end(), i)) traced.push_back(i);

  // Enumerate flat offsets for every kept / traced multi-index.
  auto offsets = [&](const std::vector<int>& factors) {
    std::vector<long long> out{0};
    for (int f : factors) {
      std::vector<long long> next;
      next.reserve(out.size() * rho.dims[f]);
      for (long long base : out)
        for (int v = 0; v < rho.dims[f]; ++v) next.push_back(base + v * strides[f]);
      out = std::move(next);
    }
    return out;
  };
  const auto kept_off = offsets(k);
  const auto traced_off = offsets(traced);

  const Eigen::Index dk = static_cast<Eigen::Index>(kept_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r)
    for (Eigen::Index c = 0; c < dk; ++c) {
      Cx acc = 0.0;
      for (long long t : traced_off) acc += rho.entries(kept_off[r] + t, kept_off[c] + t);
      out(r, c) = acc;
    }
  std::vector<int> dims;
  for (int f : k) dims.push_back(rho.dims[f]);
  return DensityMatrix(std::move(out), std::move(dims));
}

namespace {

// Eigenvalues of rho0 - rho1 and, if wanted, the eigenvectors mapped back
// to the ambient space. Large instances are first compressed onto the
// joint support (exact: both supports lie inside it).
linalg::Eigensystem difference_eig(const DensityMatrix& rho0, const DensityMatrix& rho1) {
  if (rho0.dim() <= linalg::kSupportCompressLimit)
    return linalg::hermitian_eig(rho0.entries - rho1.entries);
  const Matrix q = linalg::joint_range(rho0.entries, rho1.entries);
  const Matrix delta = q.adjoint() * (rho0.entries - rho1.entries) * q;
  linalg::Eigensystem es = linalg::hermitian_eig(delta);
  es.vectors = q * es.vectors;
  return es;
}

}  // namespace

double trace_distance(const DensityMatrix& rho0, const DensityMatrix& rho1) {
  require_same_dim(rho0, rho1);
  return 0.5 * difference_eig(rho0, rho1).values.cwiseAbs().sum();
}

std::pair<double, Povm> helstrom_pe(const DensityMatrix& rho0, const DensityMatrix& rho1) {
  require_same_dim(rho0, rho1);
  const linalg::Eigensystem es = difference_eig(rho0, rho1);
  const double pe = 0.5 - 0.25 * es.values.cwiseAbs().sum();

  std::vector<Eigen::Index> neg;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] < -kZeroEigTol) neg.push_back(i);
  Matrix vneg(rho0.dim(), static_cast<Eigen::Index>(neg.size()));
  for (Eigen::Index j = 0; j < vneg.cols(); ++j) vneg.col(j) = es.vectors.col(neg[j]);

  // Outcome "1" is the strictly-negative eigenspace of rho0 - rho1; the
  // kernel goes with outcome "0".
  Matrix e1 = vneg * vneg.adjoint();
  Matrix e0 = Matrix::Identity(rho0.dim(), rho0.dim()) - e1;
  std::vector<PovmElement> elems;
  elems.push_back({"0", std::move(e0)});
  elems.push_back({"1", std::move(e1)});
  return {pe, Povm(std::move(elems))};
}

double fidelity(const DensityMatrix& rho0, const DensityMatrix& rho1) {
  require_same_dim(rho0, rho1);
  // F = tr sqrt(sqrt(rho0) rho1 sqrt(rho0)) equals the nuclear norm of
  // L0^H L1 for any factorizations rho_i = L_i L_i^H. Pivoted-Cholesky
  // factors make this a rank0 x rank1 SVD and keep the spurious null
  // space out of the computation; square-rooting eigenvalues of the
  // product perturbed around zero would inject O(sqrt(eps)) noise per
  // near-null direction.
  const Matrix l0 = linalg::psd_factor(rho0.entries);
  const Matrix l1 = linalg::psd_factor(rho1.entries);
  if (l0.cols() == 0 || l1.cols() == 0) return 0.0;
  const Matrix s = l0.adjoint() * l1;
  return std::min(linalg::svd(s).singular_values.sum(), 1.0);
}

double transition_probability(const DensityMatrix& rho0, const DensityMatrix& rho1) {
  const double f = fidelity(rho0, rho1);
  return f * f;
}

DistinguishabilityReport distinguishability(const DensityMatrix& rho0,
                                            const DensityMatrix& rho1) {
  DistinguishabilityReport r;
  r.k = trace_distance(rho0, rho1);
  r.pe = 0.5 - 0.5 * r.k;
  r.fid = fidelity(rho0, rho1);
  r.trans = r.fid * r.fid;
  return r;
}

StateVector purify(const DensityMatrix& rho) {
  const int d = rho.dim();
  linalg::Eigensystem es = linalg::hermitian_eig(rho.entries);
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) {
    double lam = es.values[i];
    if (lam < -kPsdTol) throw std::invalid_argument("purify: negative eigenvalue");
    if (lam <= 0.0) continue;
    const double amp = std::sqrt(lam);
    for (int r = 0; r < d; ++r) psi[static_cast<Eigen::Index>(r) * d + i] += amp * es.vectors(r, i);
  }
  psi /= psi.norm();
  std::vector<int> dims = rho.dims;
  dims.push_back(d);
  return StateVector(std::move(psi), std::move(dims));
}

UhlmannResult uhlmann_unitary(const StateVector& psi0, const StateVector& psi1,
                              int free_factor) {
  if (psi0.dims != psi1.dims) throw std::invalid_argument("dims mismatch");
  const int nfac = static_cast<int>(psi0.dims.size());
  if (free_factor < 0 || free_factor >= nfac)
    throw std::invalid_argument("free factor out of range");
  const int df = psi0.dims[free_factor];
  const int dr = psi0.dim() / df;
  const auto strides = strides_of(psi0.dims);

  // Reshape onto (rest x free); rest keeps the original factor order.
  auto reshape = [&](const Vector& amp) {
    Matrix a = Matrix::Zero(dr, df);
    std::vector<int> idx(nfac, 0);
    for (Eigen::Index flat = 0; flat < amp.size(); ++flat) {
      long long rem = flat;
      int fi = 0;
      long long row = 0;
      long long rowstride = 1;
      // decompose and re-linearize the non-free factors, least significant last
      for (int k = 0; k < nfac; ++k) idx[k] = static_cast<int>((rem / strides[k]) % psi0.dims[k]);
      fi = idx[free_factor];
      for (int k = nfac - 1; k >= 0; --k) {
        if (k == free_factor) continue;
        row += idx[k] * rowstride;
        rowstride *= psi0.dims[k];
      }
      a(row, fi) = amp[flat];
      (void)rem;
    }
    return a;
  };
  const Matrix a0 = reshape(psi0.amplitudes);
  const Matrix a1 = reshape(psi1.amplitudes);

  // M[i][j] = <psi1|(I (x) |j><i|)|psi0>; the optimum of |tr(U M)| over
  // unitaries is the sum of M's singular values, at U = V W^H for M = W S V^H.
  const Matrix m = (a1.adjoint() * a0).transpose();
  const linalg::Svd sv = linalg::svd(m);
  UhlmannResult out;
  out.unitary = sv.v * sv.u.adjoint();
  out.overlap_amplitude = (out.unitary * m).trace();
  out.u = std::norm(out.overlap_amplitude);
  return out;
}

namespace {

template <typename Probs>
std::size_t sample_index(const Probs& p, Rng& rng) {
  double total = 0.0;
  for (double x : p) total += std::max(x, 0.0);
  if (total < 1e-12) throw std::invalid_argument("invalid POVM: all outcome probabilities vanish");
  const double r = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += std::max(p[i], 0.0);
    if (r < acc) return i;
  }
  return p.size() - 1;
}

}  // namespace

MeasurementSample measure(const StateVector& psi, const Povm& povm, Rng& rng) {
  if (povm.dim() != psi.dim()) throw std::invalid_argument("dimension mismatch");
  std::vector<double> p(povm.elements.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = psi.amplitudes.dot(povm.elements[i].op * psi.amplitudes).real();
  const std::size_t mu = sample_index(p, rng);
  const Matrix& e = povm.elements[mu].op;
  Vector post = is_projector(e) ? Vector(e * psi.amplitudes)
                                : Vector(linalg::psd_sqrt(e) * psi.amplitudes);
  post /= post.norm();
  MeasurementSample out;
  out.label = povm.elements[mu].label;
  out.probability = std::clamp(p[mu], 0.0, 1.0);
  out.post_state = StateVector(std::move(post), psi.dims);
  return out;
}

MeasurementSample measure(const DensityMatrix& rho, const Povm& povm, Rng& rng) {
  if (povm.dim() != rho.dim()) throw std::invalid_argument("dimension mismatch");
  std::vector<double> p(povm.elements.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = (rho.entries * povm.elements[i].op).trace().real();
  const std::size_t mu = sample_index(p, rng);
  const Matrix& e = povm.elements[mu].op;
  const Matrix s = is_projector(e) ? e : linalg::psd_sqrt(e);
  Matrix post = s * rho.entries * s;
  post /= post.trace().real();
  post = (post + Matrix(post.adjoint())) / 2.0;
  MeasurementSample out;
  out.label = povm.elements[mu].label;
  out.probability = std::clamp(p[mu], 0.0, 1.0);
  out.post_density = DensityMatrix(std::move(post), rho.dims);
  return out;
}

}  // namespace msc99::quantum
