#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qht/linalg.hpp"
#include "qht/rng.hpp"

using namespace qht;

namespace {

// closed-form eigenvalues of a 2x2 Hermitian matrix, descending
std::pair<double, double> eig2_oracle(double a, double d, cplx b) {
  double t = a + d;
  double disc = std::sqrt((a - d) * (a - d) + 4.0 * std::norm(b));
  return {0.5 * (t + disc), 0.5 * (t - disc)};
}

Matrix random_hermitian(const CounterRng& rng, std::uint64_t i, int dim) {
  Matrix m(dim);
  for (int r = 0; r < dim; ++r) {
    m(r, r) = rng.normal(i, static_cast<std::uint64_t>(r * dim + r), 0);
    for (int c = r + 1; c < dim; ++c) {
      cplx v(rng.normal(i, static_cast<std::uint64_t>(r * dim + c), 0),
             rng.normal(i, static_cast<std::uint64_t>(r * dim + c), 2));
      m(r, c) = v;
      m(c, r) = std::conj(v);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("eig: identity and diagonal inputs") {
  HermitianSpectrum s = eig(Matrix::identity(2));
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));

  s = eig(Matrix::diag({0.9, 0.1}));
  CHECK(s.eigenvalues[0] == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(s.eigenvalues[1] == doctest::Approx(0.1).epsilon(1e-14));
  // eigenvectors are the standard basis up to phase
  CHECK(std::abs(s.eigenvectors(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(s.eigenvectors(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(s.eigenvectors(1, 0)) < 1e-12);
}

TEST_CASE("eig: 2x2 closed-form oracle") {
  Matrix m(2);
  m(0, 0) = 0.5;
  m(0, 1) = 0.25;
  m(1, 0) = 0.25;
  m(1, 1) = 0.5;
  HermitianSpectrum s = eig(m);
  CHECK(s.eigenvalues[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(s.eigenvalues[1] == doctest::Approx(0.25).epsilon(1e-12));

  auto [lo_hi, lo_lo] = eig2_oracle(0.6, 0.4, cplx(0.0, 0.1));
  Matrix c(2);
  c(0, 0) = 0.6;
  c(0, 1) = cplx(0.0, 0.1);
  c(1, 0) = cplx(0.0, -0.1);
  c(1, 1) = 0.4;
  HermitianSpectrum cs = eig(c);
  CHECK(cs.eigenvalues[0] == doctest::Approx(lo_hi).epsilon(1e-12));
  CHECK(cs.eigenvalues[1] == doctest::Approx(lo_lo).epsilon(1e-12));
}

TEST_CASE("eig rejects non-Hermitian input") {
  Matrix m(2);
  m(0, 1) = 0.5;  // m(1,0) left zero
  CHECK_THROWS_AS(eig(m), Error);
}

TEST_CASE("eig: reconstruction and unitarity on 500 random matrices") {
  CounterRng rng(0x11A6);
  int dims[] = {2, 3, 4, 6, 8, 12, 16};
  for (int i = 0; i < 500; ++i) {
    int d = dims[i % 7];
    Matrix m = random_hermitian(rng, static_cast<std::uint64_t>(i), d);
    HermitianSpectrum s = eig(m);
    CHECK((s.reconstruct() - m).frobenius() <= 1e-9 * std::max(m.frobenius(), 1e-30));
    Matrix u = s.eigenvectors;
    CHECK((u.adjoint() * u - Matrix::identity(d)).max_abs_entry() <= 1e-10);
    CHECK(std::is_sorted(s.eigenvalues.rbegin(), s.eigenvalues.rend()));
  }
}

TEST_CASE("matrix_function basics") {
  Matrix p = matrix_power(Matrix::diag({0.25, 0.09}), 0.5);
  CHECK(p(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p(1, 1).real() == doctest::Approx(0.3).epsilon(1e-14));

  CHECK(matrix_log(Matrix::identity(3)).max_abs_entry() < 1e-12);

  Matrix x(2);
  x(0, 0) = 0.5;
  x(0, 1) = 0.25;
  x(1, 0) = 0.25;
  x(1, 1) = 0.5;
  CHECK((matrix_exp(matrix_log(x)) - x).max_abs_entry() <= 1e-9);
  CHECK((matrix_power(x, 1.0) - x).max_abs_entry() <= 1e-10);

  Matrix singular = Matrix::diag({1.0, 0.0});
  CHECK_THROWS_AS(matrix_log(singular), Error);
  CHECK_THROWS_AS(matrix_power(singular, -0.5), Error);
}

TEST_CASE("matrix_function: power composition property") {
  CounterRng rng(0xF00D);
  for (int i = 0; i < 40; ++i) {
    int d = 2 + (i % 4);
    Matrix g = random_hermitian(rng, static_cast<std::uint64_t>(i), d);
    Matrix pd = g * g.adjoint();  // positive semidefinite; shift to PD
    for (int r = 0; r < d; ++r) pd(r, r) += 0.5;
    double a = 0.3 + 0.1 * (i % 5), b = 0.2 + 0.07 * (i % 7);
    Matrix lhs = matrix_power(matrix_power(pd, a), b);
    Matrix rhs = matrix_power(pd, a * b);
    CHECK((lhs - rhs).frobenius() <= 1e-8 * rhs.frobenius());
  }
}

TEST_CASE("validate_state") {
  CHECK_NOTHROW(validate_state(Matrix::diag({0.5, 0.5})));

  Matrix pure = Matrix::diag({1.0, 0.0});
  CHECK_THROWS_AS(validate_state(pure, true), Error);
  CHECK_NOTHROW(validate_state(pure, false));

  Matrix c(2);
  c(0, 0) = 0.6;
  c(0, 1) = cplx(0.0, 0.1);
  c(1, 0) = cplx(0.0, -0.1);
  c(1, 1) = 0.4;
  DensityMatrix d = validate_state(c);
  CHECK(d.spectrum().eigenvalues[0] == doctest::Approx(0.641421356).epsilon(1e-8));
  CHECK(d.spectrum().eigenvalues[1] == doctest::Approx(0.358578644).epsilon(1e-8));

  Matrix bad_trace = Matrix::diag({0.7, 0.7});
  CHECK_THROWS_AS(validate_state(bad_trace), Error);
  Matrix neg = Matrix::diag({1.2, -0.2});
  CHECK_THROWS_AS(validate_state(neg, false), Error);
}

TEST_CASE("kron eigenvalues are pairwise products") {
  Matrix x(2);
  x(0, 0) = 0.7;
  x(0, 1) = cplx(0.1, 0.05);
  x(1, 0) = cplx(0.1, -0.05);
  x(1, 1) = 0.3;
  HermitianSpectrum sx = eig(x);
  HermitianSpectrum sxx = eig(kron(x, x));
  std::vector<double> expected;
  for (double a : sx.eigenvalues)
    for (double b : sx.eigenvalues) expected.push_back(a * b);
  std::sort(expected.begin(), expected.end(), std::greater<double>());
  REQUIRE(expected.size() == sxx.eigenvalues.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(sxx.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("commuting joint basis recovers both classical vectors") {
  DensityMatrix a = validate_state(Matrix::diag({0.9, 0.1}));
  DensityMatrix b = validate_state(Matrix::diag({0.2, 0.8}));
  std::vector<double> pa, pb;
  REQUIRE(commuting_classical_pair(a, b, pa, pb));
  CHECK(pa[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(pb[0] == doctest::Approx(0.2).epsilon(1e-12));

  Matrix r(2);
  r(0, 0) = 0.5;
  r(0, 1) = 0.25;
  r(1, 0) = 0.25;
  r(1, 1) = 0.5;
  DensityMatrix rho = validate_state(r);
  CHECK_FALSE(commuting_classical_pair(rho, validate_state(Matrix::diag({0.75, 0.25})), pa, pb));
}

TEST_CASE("dimension budget") {
  CHECK_THROWS_AS(validate_state(Matrix::identity(300)), Error);
}
