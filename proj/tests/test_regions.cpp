#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qht/parallel.hpp"
#include "qht/regions.hpp"
#include "qht/rng.hpp"
#include "qht/scalars.hpp"

using namespace qht;

namespace {

DensityMatrix bern(double p) { return embed_diagonal(ClassicalDistribution::bernoulli(p)); }

DensityMatrix fixed_rho() {
  Matrix m(2);
  m(0, 0) = 0.5;
  m(0, 1) = 0.25;
  m(1, 0) = 0.25;
  m(1, 1) = 0.5;
  return validate_state(m);
}
DensityMatrix fixed_sigma() { return validate_state(Matrix::diag({0.75, 0.25})); }

DensityMatrix random_qubit(const CounterRng& rng, std::uint64_t i, std::uint64_t lane0) {
  Matrix g(2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      g(r, c) = cplx(rng.normal(i, static_cast<std::uint64_t>(r * 2 + c), lane0),
                     rng.normal(i, static_cast<std::uint64_t>(r * 2 + c), lane0 + 4));
  Matrix w = g * g.adjoint();
  Matrix m = (0.95 / w.trace().real()) * w;
  m(0, 0) += 0.025;
  m(1, 1) += 0.025;
  return validate_state(m);
}

// dense-grid oracle for sup over s in (0,1) of ((s-1)/s)(a - D_s)
double hoeffding_grid_oracle(const RenyiKernels& k, double a) {
  double best = 0.0;
  for (int i = 1; i < 20000; ++i) {
    double s = i / 20000.0;
    best = std::max(best, (s - 1.0) / s * (a - k.petz(s)));
  }
  return best;
}

// independent dense (u, v)-grid oracle for the two-parameter anti-divergence
double kstar_grid_oracle(const DensityMatrix& rho, const DensityMatrix& sigma, double a, double b) {
  RenyiKernels k_rs(rho, sigma);
  const RenyiKernels& k_sr = k_rs.swapped();
  const int g = 400;
  std::vector<double> ds(g + 1), dt(g + 1);
  for (int i = 0; i <= g; ++i) {
    double u = static_cast<double>(i) / g;
    ds[static_cast<std::size_t>(i)] =
        i == 0 ? k_rs.dmax() : (i == g ? k_rs.kl() : k_rs.sandwiched(1.0 / u));
    dt[static_cast<std::size_t>(i)] =
        i == 0 ? k_sr.dmax() : (i == g ? k_sr.kl() : k_sr.sandwiched(1.0 / u));
  }
  double best = kNegInf;
  int bi = 0, bj = 0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j <= g; ++j) {
      double u = static_cast<double>(i) / g, v = static_cast<double>(j) / g;
      double denom = 1.0 / (1.0 - u) - (1.0 - v);
      double val = (b - ds[static_cast<std::size_t>(i)] +
                    (1.0 - v) * (a - dt[static_cast<std::size_t>(j)])) / denom;
      if (val > best) { best = val; bi = i; bj = j; }
    }
  auto phi = [&](double u, double v) {
    double dsu = u <= 0 ? k_rs.dmax() : (u >= 1 ? k_rs.kl() : k_rs.sandwiched(1.0 / u));
    double dtv = v <= 0 ? k_sr.dmax() : (v >= 1 ? k_sr.kl() : k_sr.sandwiched(1.0 / v));
    double denom = 1.0 / (1.0 - u) - (1.0 - v);
    return (b - dsu + (1.0 - v) * (a - dtv)) / denom;
  };
  double u = static_cast<double>(bi) / g, v = static_cast<double>(bj) / g;
  for (int round = 0; round < 4; ++round) {
    u = golden_max([&](double x) { return phi(x, v); }, std::max(0.0, u - 1.0 / g),
                   std::min(1.0 - 1e-9, u + 1.0 / g), 1e-12);
    v = golden_max([&](double x) { return phi(u, x); }, std::max(0.0, v - 1.0 / g),
                   std::min(1.0, v + 1.0 / g), 1e-12);
  }
  return std::max(0.0, std::max(best, phi(u, v)));
}

}  // namespace

TEST_CASE("hoeffding: endpoints and oracle agreement") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  double d_pq = relative_entropy(p, q), d_qp = relative_entropy(q, p);

  CHECK(hoeffding(0.0, q, p, Family::Petz) == doctest::Approx(d_pq).epsilon(1e-9));
  CHECK(hoeffding(bits_to_nats(2.0), q, p, Family::Petz) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hoeffding(0.5, p, p, Family::Petz) == doctest::Approx(0.0).epsilon(1e-12));

  RenyiKernels kqp(q, p);
  for (double a : {0.2, 0.5, 0.9, 1.2}) {
    double impl = hoeffding(a, q, p, Family::Petz);
    CHECK(impl == doctest::Approx(hoeffding_grid_oracle(kqp, a)).epsilon(1e-7));
    CHECK(impl >= 0.0);
  }
  CHECK(d_qp > 0);  // silence unused warnings on some compilers
}

TEST_CASE("hoeffding: monotone nonincreasing in A") {
  RenyiKernels kqp(ClassicalDistribution::bernoulli(0.2), ClassicalDistribution::bernoulli(0.9));
  double prev = kPosInf;
  for (int j = 0; j < 20; ++j) {
    double a = 1.5 * j / 19.0;
    double h = hoeffding_div(kqp, Family::Petz, a);
    CHECK(h <= prev + 1e-9);
    prev = h;
  }
}

TEST_CASE("hoeffding inverse identity") {
  RenyiKernels kpq(ClassicalDistribution::bernoulli(0.9), ClassicalDistribution::bernoulli(0.2));
  const RenyiKernels& kqp = kpq.swapped();
  double dqp = kqp.kl();
  for (int j = 1; j <= 10; ++j) {
    double r = dqp * j / 11.0;
    double h = hoeffding_div(kqp, Family::Petz, r);
    CHECK(hoeffding_div(kpq, Family::Petz, h) == doctest::Approx(r).epsilon(1e-5));
  }
}

TEST_CASE("han-kobayashi: zero below the Stein point, linear far above") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  CHECK(han_kobayashi(0.0, p, q) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(han_kobayashi(relative_entropy(q, p), q, p) == doctest::Approx(0.0).epsilon(1e-9));

  double thr = han_kobayashi_linear_threshold(p, q);
  CHECK(nats_to_bits(thr) < 5.0);  // the example rate sits in the linear regime
  double r5 = bits_to_nats(5.0);
  CHECK(nats_to_bits(han_kobayashi(r5, p, q)) == doctest::Approx(5.0 - std::log2(4.5)).epsilon(1e-9));
  // nondecreasing in R
  double prev = -1.0;
  for (int j = 0; j < 20; ++j) {
    double r = bits_to_nats(4.0) * j / 19.0;
    double h = han_kobayashi(r, p, q);
    CHECK(h >= prev - 1e-9);
    prev = h;
  }
}

TEST_CASE("conclusive region: rectangle reduction and outer bound") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  double d_pq = relative_entropy(p, q), d_qp = relative_entropy(q, p);

  ConclusiveRegionResult zero = conclusive_region({0, 0, 0, 0}, p, q);
  CHECK(zero.inside);
  CHECK(zero.slack1 == doctest::Approx(d_qp).epsilon(1e-8));
  CHECK(zero.slack2 == doctest::Approx(d_pq).epsilon(1e-8));

  ConclusiveRegionResult out = conclusive_region({d_qp + 0.01, 0, 0, 0}, p, q);
  CHECK_FALSE(out.inside);
  CHECK(out.slack1 < 0);

  double d_omega = projective_metrics(p, q).d_omega;
  for (int ki = 0; ki < 5; ++ki)
    for (int li = 0; li < 5; ++li) {
      double kk = 10.0 * ki / 4.0, ll = 10.0 * li / 4.0;
      ExponentQuery qq{0.5 * (d_omega + 0.01), 0.5 * (d_omega + 0.01), kk, ll};
      CHECK_FALSE(conclusive_region(qq, p, q).inside);
    }

  // exact boolean agreement with the rectangle on a 50x50 grid (guard band 1e-6)
  auto [c1, c2] = conclusive_thresholds(0.0, 0.0, p, q);
  int mismatches = 0;
  for (int ai = 0; ai < 50; ++ai)
    for (int bi = 0; bi < 50; ++bi) {
      double a = 1.2 * d_qp * ai / 49.0, b = 1.2 * d_pq * bi / 49.0;
      if (std::abs(a - d_qp) < 1e-6 || std::abs(b - d_pq) < 1e-6) continue;
      bool by_op = a <= c1 && b <= c2;
      if (by_op != (a <= d_qp && b <= d_pq)) ++mismatches;
    }
  CHECK(mismatches == 0);
}

TEST_CASE("min conclusiveness exponent straddles the one-sided boundary") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  CHECK(min_conclusiveness_exponent(0.0, 0.0, p, q) == doctest::Approx(0.0).epsilon(1e-12));

  double a = relative_entropy(q, p) + 0.2;
  double b_star = onesided_boundary(a, p, q);
  CHECK(min_conclusiveness_exponent(a, std::max(0.0, b_star - 0.01), p, q) ==
        doctest::Approx(0.0).epsilon(1e-12));
  double outside = min_conclusiveness_exponent(a, b_star + 0.05, p, q);
  CHECK(outside > 0.0);
  CHECK(outside == doctest::Approx(kstar_grid_oracle(p, q, a, b_star + 0.05)).epsilon(1e-6));

  // beyond the postselected limit no conclusiveness decay suffices
  double d_omega = projective_metrics(p, q).d_omega;
  CHECK(std::isinf(min_conclusiveness_exponent(d_omega, 0.1, p, q)));
}

TEST_CASE("one-sided boundary") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  double d_pq = relative_entropy(p, q), d_qp = relative_entropy(q, p);
  CHECK(onesided_boundary(0.0, p, q) == doctest::Approx(d_pq).epsilon(1e-9));
  CHECK(onesided_boundary(d_qp, p, q) == doctest::Approx(d_pq).epsilon(1e-9));  // flat at Stein
  double dp = d_plus(q, p);
  CHECK(onesided_boundary(dp, p, q) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("d_plus and its simplification") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  DensityMatrix half = validate_state(Matrix::diag({0.5, 0.5}));
  CHECK(d_plus(half, half) == doctest::Approx(0.0).epsilon(1e-9));

  CHECK(nats_to_bits(d_plus(q, p)) == doctest::Approx(4.652933).epsilon(1e-6));
  DPlusSimplification s = d_plus_simplification(q, p);
  CHECK(s.condition_holds);
  REQUIRE(s.simplified.has_value());
  CHECK(*s.simplified == doctest::Approx(d_plus(q, p)).epsilon(1e-6));
  // classical case: the condition right-hand side reduces to -log Tr Pi P
  CHECK(nats_to_bits(s.condition_rhs) == doctest::Approx(std::log2(10.0)).epsilon(1e-9));

  CounterRng rng(0xD9);
  for (int i = 0; i < 10; ++i) {
    DensityMatrix r = random_qubit(rng, static_cast<std::uint64_t>(i), 0);
    DensityMatrix ss = random_qubit(rng, static_cast<std::uint64_t>(i), 16);
    CHECK(d_plus(ss, r) >= relative_entropy(ss, r) + relative_entropy(r, ss) - 1e-8);
    DPlusSimplification ds = d_plus_simplification(ss, r);
    if (ds.condition_holds) CHECK(*ds.simplified == doctest::Approx(d_plus(ss, r)).epsilon(1e-6));
  }
}

TEST_CASE("classical reject region branches") {
  ClassicalDistribution p = ClassicalDistribution::bernoulli(0.9);
  ClassicalDistribution q = ClassicalDistribution::bernoulli(0.2);
  RenyiKernels kpq(p, q);
  const RenyiKernels& kqp = kpq.swapped();
  double kk = bits_to_nats(0.1), ll = bits_to_nats(0.1);

  double tiny_k = 1e-4;
  double a1 = 0.5 * tiny_k;  // A < K
  CHECK(classical_reject_region(a1, tiny_k, ll, p, q) ==
        doctest::Approx(hoeffding_div(kqp, Family::Petz, a1)).epsilon(1e-9));

  double a2 = bits_to_nats(1.0);  // K <= A <= H_L
  double mid = classical_reject_region(a2, kk, ll, p, q);
  CHECK(mid == doctest::Approx(hoeffding_div(kqp, Family::Petz, kk)).epsilon(1e-9));
  CHECK(mid > hoeffding_div(kqp, Family::Petz, a2));  // beats conventional testing

  double a3 = bits_to_nats(5.0);  // far beyond D(Q||P)
  CHECK(classical_reject_region(a3, kk, ll, p, q) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quantum reject region") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  ClassicalDistribution pc = ClassicalDistribution::bernoulli(0.9);
  ClassicalDistribution qc = ClassicalDistribution::bernoulli(0.2);
  double kk = bits_to_nats(0.1), ll = bits_to_nats(0.1);

  for (double ab : {0.05, 0.5, 1.0, 1.5}) {
    double a = bits_to_nats(ab);
    QuantumRejectRegion r = quantum_reject_region(a, kk, ll, p, q);
    double cl = classical_reject_region(a, kk, ll, pc, qc);
    CHECK(r.achievable_B == doctest::Approx(cl).epsilon(1e-8));
    CHECK(r.converse_B == doctest::Approx(cl).epsilon(1e-8));
  }

  DensityMatrix half = validate_state(Matrix::diag({0.5, 0.5}));
  QuantumRejectRegion same = quantum_reject_region(0.0, kk, ll, half, half);
  CHECK(same.achievable_B == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(same.converse_B == doctest::Approx(0.0).epsilon(1e-12));

  QuantumRejectRegion f = quantum_reject_region(bits_to_nats(0.5), kk, ll, fixed_rho(), fixed_sigma());
  CHECK(f.achievable_B <= f.converse_B + 1e-12);  // the gap is reported, never asserted away
  CHECK(f.achievable_B >= 0.0);
}

TEST_CASE("symmetric boundary") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  SymmetricQuery avg{0.0, 0.0, 0.5, SymmetricMode::Average};
  SymmetricQuery maxm{0.0, 0.0, 0.5, SymmetricMode::Maximal};
  CHECK(nats_to_bits(symmetric_boundary(avg, p, q)) == doctest::Approx(1.966015).epsilon(1e-6));
  CHECK(nats_to_bits(symmetric_boundary(maxm, p, q)) == doctest::Approx(1.652933).epsilon(1e-6));

  SymmetricQuery big{0.0, bits_to_nats(100.0), 0.5, SymmetricMode::Average};
  CHECK(nats_to_bits(symmetric_boundary(big, p, q)) == doctest::Approx(3.0).epsilon(1e-3));

  double prev = -1.0;
  for (int j = 0; j < 20; ++j) {
    SymmetricQuery sq{0.0, bits_to_nats(9.0) * j / 19.0, 0.5, SymmetricMode::Average};
    double e = symmetric_boundary(sq, p, q);
    CHECK(e >= prev - 1e-9);
    prev = e;
  }
  CHECK_THROWS_AS(symmetric_boundary({0.0, 0.0, 1.0, SymmetricMode::Average}, p, q), Error);
}

TEST_CASE("boundary scans: endpoints, nesting, serialization") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  double d_pq = relative_entropy(p, q), d_qp = relative_entropy(q, p);

  RegionBoundary det = boundary_scan(BoundaryKind::DeterministicHoeffding, {}, p, q, 64);
  CHECK(det.samples.front().x == doctest::Approx(0.0));
  CHECK(det.samples.front().y == doctest::Approx(d_pq).epsilon(1e-9));
  CHECK(det.samples.back().x == doctest::Approx(d_qp).epsilon(1e-12));
  CHECK(det.samples.back().y == doctest::Approx(0.0).epsilon(1e-9));

  RegionBoundary rect = boundary_scan(BoundaryKind::HighConclusiveness, {}, p, q, 64);
  RegionBoundary one = boundary_scan(BoundaryKind::Onesided, {}, p, q, 64);
  for (std::size_t i = 0; i < det.samples.size(); ++i) {
    CHECK(det.samples[i].y <= rect.samples[i].y + 1e-9);  // deterministic inside the rectangle
    double a = rect.samples[i].x;
    CHECK(rect.samples[i].y <= onesided_boundary(a, p, q) + 1e-9);  // rectangle inside one-sided
  }
  for (std::size_t i = 1; i < one.samples.size(); ++i)
    CHECK(one.samples[i].x > one.samples[i - 1].x);

  CHECK_THROWS_AS(boundary_scan(BoundaryKind::Onesided, {}, p, q, 1), Error);

  BoundaryParams kl_params;
  kl_params.K = bits_to_nats(0.1);
  kl_params.L = bits_to_nats(0.1);
  RegionBoundary slice = boundary_scan(BoundaryKind::ConclusiveKLSlice, kl_params, p, q, 16);
  auto [c1, c2] = conclusive_thresholds(kl_params.K, kl_params.L, p, q);
  CHECK(slice.samples.back().x == doctest::Approx(c1 - kl_params.K).epsilon(1e-9));
  CHECK(slice.samples.front().y == doctest::Approx(c2 - kl_params.L).epsilon(1e-9));

  BoundaryParams sym;
  sym.fixed_z = 0.0;
  sym.mode = SymmetricMode::Maximal;
  RegionBoundary single = boundary_scan(BoundaryKind::Symmetric, sym, p, q, 2);
  REQUIRE(single.samples.size() == 1);
  CHECK(single.samples[0].y == doctest::Approx(std::min(d_pq, d_qp)).epsilon(1e-9));

  // CSV and JSON round trips
  std::string path = "test_region_out.csv";
  det.write_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,y");
  std::string first_row;
  std::getline(in, first_row);
  double x0, y0;
  REQUIRE(std::sscanf(first_row.c_str(), "%lf,%lf", &x0, &y0) == 2);
  CHECK(x0 == doctest::Approx(det.samples[0].x));
  CHECK(y0 == doctest::Approx(det.samples[0].y));
  in.close();
  std::remove(path.c_str());

  std::string j = det.to_json();
  CHECK(j.find("\"x_label\"") != std::string::npos);
  CHECK(j.find("\"points\"") != std::string::npos);
}

TEST_CASE("boundary scan output is identical for any worker count") {
  DensityMatrix p = bern(0.9), q = bern(0.2);
  par::set_threads(1);
  RegionBoundary one = boundary_scan(BoundaryKind::Onesided, {}, p, q, 32);
  par::set_threads(par::max_threads());
  RegionBoundary many = boundary_scan(BoundaryKind::Onesided, {}, p, q, 32);
  REQUIRE(one.samples.size() == many.samples.size());
  for (std::size_t i = 0; i < one.samples.size(); ++i) {
    CHECK(one.samples[i].x == many.samples[i].x);  // bitwise
    CHECK(one.samples[i].y == many.samples[i].y);
  }
}
