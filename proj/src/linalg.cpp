#include "qht/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qht {

Matrix Matrix::adjoint() const {
  Matrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

cplx Matrix::trace() const {
  cplx t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (const cplx& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double Matrix::max_abs_entry() const {
  double m = 0.0;
  for (const cplx& v : a_) m = std::max(m, std::abs(v));
  return m;
}

bool Matrix::is_hermitian(double tol) const {
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}
Matrix& Matrix::operator-=(const Matrix& o) {
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}
Matrix& Matrix::operator*=(cplx s) {
  for (cplx& v : a_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  int n = a.dim();
  Matrix r(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      cplx aik = a(i, k);
      if (aik == cplx(0.0)) continue;
      for (int j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

Matrix operator*(cplx s, Matrix a) { return a *= s; }

Matrix kron(const Matrix& a, const Matrix& b) {
  int n = a.dim(), m = b.dim();
  Matrix r(n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (a(i, j) == cplx(0.0)) continue;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) r(i * m + k, j * m + l) = a(i, j) * b(k, l);
    }
  return r;
}

double commutator_norm(const Matrix& a, const Matrix& b) { return (a * b - b * a).frobenius(); }

Matrix HermitianSpectrum::reconstruct() const { return apply(eigenvalues); }

Matrix HermitianSpectrum::apply(const std::vector<double>& fvals) const {
  int n = eigenvectors.dim();
  Matrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k)
        s += eigenvectors(i, k) * fvals[static_cast<std::size_t>(k)] * std::conj(eigenvectors(j, k));
      r(i, j) = s;
    }
  return r;
}

HermitianSpectrum eig(const Matrix& x, double hermitian_tol) {
  int n = x.dim();
  if (n <= 0) throw Error(ErrorKind::BadInput, "empty matrix");
  if (!x.is_hermitian(hermitian_tol)) throw Error(ErrorKind::NonHermitian, "matrix is not Hermitian within tolerance");

  // Work on the Hermitian average so roundoff asymmetry cannot bias sweeps.
  Matrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (x(i, j) + std::conj(x(j, i)));
  Matrix v = Matrix::identity(n);

  const double norm = a.frobenius();
  const double stop = 1e-13 * (norm > 0 ? norm : 1.0);

  auto offdiag = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && offdiag() > stop; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        cplx apq = a(p, q);
        double mag = std::abs(apq);
        if (mag == 0.0) continue;
        double app = a(p, p).real();
        double aqq = a(q, q).real();
        // unitary 2x2 rotation annihilating a(p,q)
        cplx phase = apq / mag;
        double theta = 0.5 * std::atan2(2.0 * mag, app - aqq);
        double c = std::cos(theta);
        cplx s = std::sin(theta) * std::conj(phase);
        // rows/columns update: [p', q'] = [c p + s* q ; -s p + c q] style
        for (int k = 0; k < n; ++k) {
          cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp + s * akq;
          a(k, q) = -std::conj(s) * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + std::conj(s) * aqk;
          a(q, k) = -s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp + s * vkq;
          v(k, q) = -std::conj(s) * vkp + c * vkq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

  HermitianSpectrum out;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.eigenvectors = Matrix(n);
  for (int j = 0; j < n; ++j) {
    int src = order[static_cast<std::size_t>(j)];
    out.eigenvalues[static_cast<std::size_t>(j)] = a(src, src).real();
    for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, src);
  }
  return out;
}

Matrix matrix_function(const Matrix& x, MatrixFn f, double t) {
  HermitianSpectrum s = eig(x);
  double lmax = s.eigenvalues.empty() ? 0.0 : std::abs(s.eigenvalues.front());
  bool needs_positive = (f == MatrixFn::Log) || (f == MatrixFn::Power && t < 0.0);
  std::vector<double> fv(s.eigenvalues.size());
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    double l = s.eigenvalues[i];
    if (needs_positive && l <= std::max(1e-14 * lmax, 0.0))
      throw Error(ErrorKind::SingularMatrix, "log/negative power of a rank-deficient matrix");
    switch (f) {
      case MatrixFn::Power:
        if (l < 0.0 && std::abs(l) <= 1e-12 * std::max(lmax, 1.0)) l = 0.0;  // clip roundoff
        fv[i] = std::pow(l, t);
        break;
      case MatrixFn::Log: fv[i] = std::log(l); break;
      case MatrixFn::Exp: fv[i] = std::exp(l); break;
    }
  }
  return s.apply(fv);
}

DensityMatrix validate_state(const Matrix& x, bool require_full_rank) {
  if (x.dim() <= 0) throw Error(ErrorKind::NotAState, "empty matrix");
  if (x.dim() > 256) throw Error(ErrorKind::DimensionBudget, "dimension exceeds 256");
  if (!x.is_hermitian(1e-10)) throw Error(ErrorKind::NotAState, "not Hermitian within 1e-10");
  cplx tr = x.trace();
  if (std::abs(tr - cplx(1.0)) > 1e-10) throw Error(ErrorKind::NotAState, "trace differs from one beyond 1e-10");

  DensityMatrix d;
  d.spec_ = eig(x);
  d.min_eig_ = d.spec_.eigenvalues.back();
  if (d.min_eig_ < -1e-12) throw Error(ErrorKind::NotAState, "negative eigenvalue beyond tolerance");
  if (require_full_rank && d.min_eig_ <= 1e-12)
    throw Error(ErrorKind::RankDeficient, "full-rank state required, smallest eigenvalue <= 1e-12");
  d.mat_ = x;
  return d;
}

bool ClassicalDistribution::full_support() const {
  for (double p : probs)
    if (p <= 0.0) return false;
  return true;
}

void ClassicalDistribution::validate(bool require_full_support) const {
  if (probs.empty()) throw Error(ErrorKind::NotAState, "empty distribution");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw Error(ErrorKind::NotAState, "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorKind::NotAState, "probabilities do not sum to one within 1e-12");
  if (require_full_support && !full_support())
    throw Error(ErrorKind::RankDeficient, "distribution lacks full support");
}

DensityMatrix embed_diagonal(const ClassicalDistribution& p) {
  p.validate(false);
  return validate_state(Matrix::diag(p.probs), false);
}

bool is_diagonal(const Matrix& x, double tol) {
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j)
      if (i != j && std::abs(x(i, j)) > tol) return false;
  return true;
}

bool commuting_joint_basis(const DensityMatrix& a, const DensityMatrix& b, Matrix& basis, double tol) {
  double scale = std::max(1.0, a.mat().frobenius() * b.mat().frobenius());
  if (commutator_norm(a.mat(), b.mat()) > tol * scale) return false;

  const HermitianSpectrum& sa = a.spectrum();
  int n = a.dim();
  basis = sa.eigenvectors;

  // Inside each eigenvalue cluster of `a`, diagonalise the compressed block
  // of `b`; outside clusters the overlap vanishes because [a, b] = 0.
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && std::abs(sa.eigenvalues[static_cast<std::size_t>(end)] -
                               sa.eigenvalues[static_cast<std::size_t>(start)]) <=
                          1e-10 * std::max(1.0, std::abs(sa.eigenvalues[static_cast<std::size_t>(start)])))
      ++end;
    int m = end - start;
    if (m > 1) {
      Matrix block(m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          cplx s = 0.0;
          for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
              s += std::conj(sa.eigenvectors(r, start + i)) * b.mat()(r, c) * sa.eigenvectors(c, start + j);
          block(i, j) = s;
        }
      HermitianSpectrum sb = eig(block, 1e-8);
      for (int r = 0; r < n; ++r)
        for (int j = 0; j < m; ++j) {
          cplx s = 0.0;
          for (int i = 0; i < m; ++i) s += sa.eigenvectors(r, start + i) * sb.eigenvectors(i, j);
          basis(r, start + j) = s;
        }
    }
    start = end;
  }
  return true;
}

bool commuting_classical_pair(const DensityMatrix& a, const DensityMatrix& b,
                              std::vector<double>& pa, std::vector<double>& pb, double tol) {
  Matrix basis;
  if (!commuting_joint_basis(a, b, basis, tol)) return false;
  int n = a.dim();
  pa.assign(static_cast<std::size_t>(n), 0.0);
  pb.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    cplx va = 0.0, vb = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        cplx u = std::conj(basis(r, j)) * basis(c, j);
        va += u * a.mat()(r, c);
        vb += u * b.mat()(r, c);
      }
    pa[static_cast<std::size_t>(j)] = va.real();
    pb[static_cast<std::size_t>(j)] = vb.real();
  }
  return true;
}

}  // namespace qht
