#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qht/errors.hpp"

namespace qht {

using cplx = std::complex<double>;

// Dense complex matrix, row-major.  Dimensions here stay small (d <= 256).
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {}

  static Matrix identity(int dim) {
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diag(const std::vector<double>& d) {
    Matrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return m;
  }

  int dim() const { return dim_; }
  cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  const cplx& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  const std::vector<cplx>& data() const { return a_; }
  std::vector<cplx>& data() { return a_; }

  Matrix adjoint() const;
  cplx trace() const;
  double frobenius() const;
  double max_abs_entry() const;
  bool is_hermitian(double tol) const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(cplx s);

 private:
  int dim_ = 0;
  std::vector<cplx> a_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(cplx s, Matrix a);
Matrix kron(const Matrix& a, const Matrix& b);
double commutator_norm(const Matrix& a, const Matrix& b);

// Eigen-decomposition of a Hermitian matrix: descending eigenvalues,
// eigenvectors as the columns of a unitary.
struct HermitianSpectrum {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // column j pairs with eigenvalues[j]

  Matrix reconstruct() const;
  // U diag(f(lambda)) U^dagger
  Matrix apply(const std::vector<double>& fvals) const;
};

// Cyclic Jacobi rotations; sweeps until the off-diagonal Frobenius mass drops
// below 1e-13 * ||X||_F, at most 100 sweeps.  Throws NonHermitian if the
// input violates the symmetry tolerance.
HermitianSpectrum eig(const Matrix& x, double hermitian_tol = 1e-10);

enum class MatrixFn { Power, Log, Exp };

// f applied to the eigenvalues in the eigenbasis; `t` is the power exponent
// (ignored for log/exp).  Throws SingularMatrix for log or negative powers of
// rank-deficient input.
Matrix matrix_function(const Matrix& x, MatrixFn f, double t = 0.0);

inline Matrix matrix_power(const Matrix& x, double t) { return matrix_function(x, MatrixFn::Power, t); }
inline Matrix matrix_log(const Matrix& x) { return matrix_function(x, MatrixFn::Log); }
inline Matrix matrix_exp(const Matrix& x) { return matrix_function(x, MatrixFn::Exp); }

// A validated quantum state: Hermitian, unit trace, positive.  The spectrum
// is computed once at validation time and reused by every divergence.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  const Matrix& mat() const { return mat_; }
  const HermitianSpectrum& spectrum() const { return spec_; }
  int dim() const { return mat_.dim(); }
  double min_eigenvalue() const { return min_eig_; }
  bool full_rank() const { return min_eig_ > 1e-12; }

  friend DensityMatrix validate_state(const Matrix& x, bool require_full_rank);

 private:
  Matrix mat_;
  HermitianSpectrum spec_;
  double min_eig_ = 0.0;
};

DensityMatrix validate_state(const Matrix& x, bool require_full_rank = true);

// Probability vector on a finite alphabet.
struct ClassicalDistribution {
  std::vector<double> probs;

  int alphabet_size() const { return static_cast<int>(probs.size()); }
  bool full_support() const;
  void validate(bool require_full_support = true) const;

  static ClassicalDistribution bernoulli(double p) { return {{p, 1.0 - p}}; }
};

DensityMatrix embed_diagonal(const ClassicalDistribution& p);
bool is_diagonal(const Matrix& x, double tol = 1e-12);

// Joint eigenbasis of two commuting states: diagonalise a, then re-diagonalise
// b inside each (near-)degenerate eigenvalue cluster of a.  Returns false if
// [a, b] is not negligible.
bool commuting_joint_basis(const DensityMatrix& a, const DensityMatrix& b, Matrix& basis,
                           double tol = 1e-10);

// Classical vectors of a commuting pair in their common basis.
bool commuting_classical_pair(const DensityMatrix& a, const DensityMatrix& b,
                              std::vector<double>& pa, std::vector<double>& pb,
                              double tol = 1e-10);

}  // namespace qht
