#include "qht/regions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "qht/io.hpp"
#include "qht/parallel.hpp"
#include "qht/scalars.hpp"

namespace qht {

namespace {

// family D_s on kernels
double family_ds(const RenyiKernels& k, Family family, double s) {
  switch (family) {
    case Family::Petz: return k.petz(s);
    case Family::Sandwiched: return k.sandwiched(s);
    case Family::ReverseSandwiched: return k.reverse_sandwiched(s);
  }
  return 0.0;
}

// lim_{s->0+} ((1-s)/s) D_s for the family; this is the a = 0 endpoint of
// the Hoeffding supremum.
double zero_order_anti_limit(const RenyiKernels& k, Family family) {
  switch (family) {
    case Family::Petz:
    case Family::ReverseSandwiched:
      // Petz obeys (1-s) D_s(x||y) = s D_{1-s}(y||x); the reverse-sandwiched
      // case telescopes to tilde D_{1-s} of the swapped pair.  Both limits
      // equal the swapped relative entropy.
      return k.swapped().kl();
    case Family::Sandwiched: {
      auto e = [&](double eps) { return (1.0 - eps) / eps * k.sandwiched(eps); };
      return richardson3(e(1e-3), e(5e-4), e(2.5e-4)).value;
    }
  }
  return 0.0;
}

}  // namespace

double hoeffding_div(const RenyiKernels& k, Family family, double a) {
  auto f = [&](double s) { return (s - 1.0) / s * (a - family_ds(k, family, s)); };
  std::optional<double> left;
  if (a == 0.0) left = zero_order_anti_limit(k, family);
  return std::max(0.0, sup_unit_interval(f, 512, left, 0.0));
}

double han_kobayashi_div(const RenyiKernels& k, double r) {
  auto f = [&](double u) {
    double s = 1.0 / u;
    return (1.0 - u) * (r - k.sandwiched(s));
  };
  return std::max(0.0, sup_unit_interval(f, 512, r - k.dmax(), 0.0));
}

double han_kobayashi_linear_threshold_div(const RenyiKernels& k) {
  double dm = k.dmax();
  // (s-1)(D_max - tilde D_s) is non-decreasing in s; extrapolate s -> inf.
  auto f = [&](double s) { return (s - 1.0) * (dm - k.sandwiched(s)); };
  double s0 = 4e4;
  RichardsonResult r = richardson3(f(s0), f(2.0 * s0), f(4.0 * s0));
  return r.value + dm;
}

double conclusive_inf(const RenyiKernels& k, double coeff) {
  auto f = [&](double u) {
    double t = 1.0 / u;
    return coeff / (1.0 - u) + k.sandwiched(t);
  };
  std::optional<double> right;
  if (coeff == 0.0) right = k.kl();
  // u -> 1 is a 0/0 corner of tilde D_{1/u}; the closed form above covers it
  return inf_unit_interval(f, 512, coeff + k.dmax(), right, 1e-10, 1e-5);
}

double symmetric_inf(const RenyiKernels& k, double z) {
  auto f = [&](double u) {
    double s = 1.0 / u;
    return z * u / (1.0 - u) + k.sandwiched(s);
  };
  std::optional<double> right;
  if (z == 0.0) right = k.kl();
  return inf_unit_interval(f, 512, k.dmax(), right, 1e-10, 1e-5);
}

double hoeffding(double a, const DensityMatrix& rho, const DensityMatrix& sigma, Family family) {
  if (a < 0.0) throw Error(ErrorKind::BadInput, "exponent must be nonnegative");
  return hoeffding_div(RenyiKernels(rho, sigma), family, a);
}

double han_kobayashi(double r, const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (r < 0.0) throw Error(ErrorKind::BadInput, "rate must be nonnegative");
  return han_kobayashi_div(RenyiKernels(rho, sigma), r);
}

double han_kobayashi_linear_threshold(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return han_kobayashi_linear_threshold_div(RenyiKernels(rho, sigma));
}

std::pair<double, double> conclusive_thresholds(double big_k, double big_l,
                                                const DensityMatrix& rho, const DensityMatrix& sigma) {
  RenyiKernels k_rs(rho, sigma);
  return {conclusive_inf(k_rs.swapped(), big_l), conclusive_inf(k_rs, big_k)};
}

ConclusiveRegionResult conclusive_region(const ExponentQuery& q, const DensityMatrix& rho,
                                         const DensityMatrix& sigma) {
  if (q.A < 0 || q.B < 0 || q.K < 0 || q.L < 0)
    throw Error(ErrorKind::BadInput, "exponents must be nonnegative");
  auto [c1, c2] = conclusive_thresholds(q.K, q.L, rho, sigma);
  double slack1 = c1 - (q.A + q.K);
  double slack2 = c2 - (q.B + q.L);
  return {slack1 >= 0.0 && slack2 >= 0.0, slack1, slack2};
}

double min_conclusiveness_exponent(double a, double b, const DensityMatrix& rho,
                                   const DensityMatrix& sigma) {
  if (a < 0.0 || b < 0.0) throw Error(ErrorKind::BadInput, "exponents must be nonnegative");
  RenyiKernels k_rs(rho, sigma);
  const RenyiKernels& k_sr = k_rs.swapped();
  double d_omega = k_rs.dmax() + k_sr.dmax();
  if (a + b > d_omega + 1e-12) return kPosInf;  // beyond the postselected limit

  // sandwiched divergences along each axis, with closed forms at the edges
  auto ds = [&](double u) {  // tilde D_{1/u}(rho||sigma)
    if (u <= 0.0) return k_rs.dmax();
    if (u >= 1.0) return k_rs.kl();
    return k_rs.sandwiched(1.0 / u);
  };
  auto dt = [&](double v) {  // tilde D_{1/v}(sigma||rho)
    if (v <= 0.0) return k_sr.dmax();
    if (v >= 1.0) return k_sr.kl();
    return k_sr.sandwiched(1.0 / v);
  };
  auto phi = [&](double u, double v) {
    if (u >= 1.0) return 0.0;  // denominator diverges
    double denom = 1.0 / (1.0 - u) - (1.0 - v);
    return (b - ds(u) + (1.0 - v) * (a - dt(v))) / denom;
  };

  const int g = 128;
  std::vector<double> ds_cache(g + 1), dt_cache(g + 1);
  for (int i = 0; i <= g; ++i) {
    ds_cache[static_cast<std::size_t>(i)] = ds(static_cast<double>(i) / g);
    dt_cache[static_cast<std::size_t>(i)] = dt(static_cast<double>(i) / g);
  }
  double best = kNegInf;
  double bu = 0.0, bv = 0.0;
  for (int i = 0; i <= g; ++i) {
    double u = static_cast<double>(i) / g;
    if (u >= 1.0) continue;
    double du = ds_cache[static_cast<std::size_t>(i)];
    for (int j = 0; j <= g; ++j) {
      double v = static_cast<double>(j) / g;
      double denom = 1.0 / (1.0 - u) - (1.0 - v);
      double val = (b - du + (1.0 - v) * (a - dt_cache[static_cast<std::size_t>(j)])) / denom;
      if (val > best) { best = val; bu = u; bv = v; }
    }
  }
  // coordinate-wise golden refinement; the objective is smooth in the interior
  for (int round = 0; round < 3; ++round) {
    double lo = std::max(0.0, bu - 1.0 / g), hi = std::min(1.0 - 1e-9, bu + 1.0 / g);
    bu = golden_max([&](double u) { return phi(u, bv); }, lo, hi);
    lo = std::max(0.0, bv - 1.0 / g), hi = std::min(1.0, bv + 1.0 / g);
    bv = golden_max([&](double v) { return phi(bu, v); }, lo, hi);
  }
  best = std::max(best, phi(bu, bv));
  return std::max(0.0, best);
}

double onesided_boundary(double a, const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (a < 0.0) throw Error(ErrorKind::BadInput, "exponent must be nonnegative");
  RenyiKernels k_rs(rho, sigma);
  return std::max(0.0, k_rs.kl() - han_kobayashi_div(k_rs.swapped(), a));
}

double d_plus(const DensityMatrix& sigma, const DensityMatrix& rho) {
  RenyiKernels k_sr(sigma, rho);
  return conclusive_inf(k_sr, k_sr.swapped().kl());
}

DPlusSimplification d_plus_simplification(const DensityMatrix& sigma, const DensityMatrix& rho) {
  RenyiKernels k_sr(sigma, rho);
  double d_rs = k_sr.swapped().kl();
  double dm = k_sr.dmax();

  // Pi projects onto the top eigenvalue cluster of rho^{-1/2} sigma rho^{-1/2}
  std::vector<double> inv_sqrt(rho.spectrum().eigenvalues.size());
  for (std::size_t i = 0; i < inv_sqrt.size(); ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(rho.spectrum().eigenvalues[i]);
  Matrix rm = rho.spectrum().apply(inv_sqrt);
  HermitianSpectrum delta = eig(rm * sigma.mat() * rm, 1e-8);
  int n = rho.dim();
  int cluster = 1;
  while (cluster < n &&
         delta.eigenvalues[static_cast<std::size_t>(cluster)] >=
             delta.eigenvalues[0] * (1.0 - 1e-10))
    ++cluster;

  // compress log(rho) to the cluster subspace and exponentiate there
  Matrix log_rho = matrix_log(rho.mat());
  Matrix block(cluster);
  for (int i = 0; i < cluster; ++i)
    for (int j = 0; j < cluster; ++j) {
      cplx s = 0.0;
      for (int r = 0; r < n; ++r)
        for (int t = 0; t < n; ++t)
          s += std::conj(delta.eigenvectors(r, i)) * log_rho(r, t) * delta.eigenvectors(t, j);
      block(i, j) = s;
    }
  HermitianSpectrum bs = eig(block, 1e-8);
  double tr = 0.0;
  for (double ev : bs.eigenvalues) tr += std::exp(ev);
  double rhs = -std::log(tr);

  DPlusSimplification out;
  out.condition_lhs = d_rs + dm;
  out.condition_rhs = rhs;
  out.condition_holds = out.condition_lhs >= out.condition_rhs;
  if (out.condition_holds) out.simplified = dm + d_rs;
  return out;
}

double classical_reject_region(double a, double big_k, double big_l,
                               const ClassicalDistribution& p, const ClassicalDistribution& q) {
  if (a < 0.0 || big_k < 0.0 || big_l < 0.0)
    throw Error(ErrorKind::BadInput, "exponents must be nonnegative");
  p.validate();
  q.validate();
  RenyiKernels kpq(p, q);
  const RenyiKernels& kqp = kpq.swapped();
  double h_l = hoeffding_div(kpq, Family::Petz, big_l);
  double h_a = hoeffding_div(kqp, Family::Petz, a);
  if (a <= h_l) return std::max(h_a, hoeffding_div(kqp, Family::Petz, big_k));
  return h_a;
}

QuantumRejectRegion quantum_reject_region(double a, double big_k, double big_l,
                                          const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (a < 0.0 || big_k <= 0.0 || big_l <= 0.0)
    throw Error(ErrorKind::BadInput, "requires A >= 0 and K, L > 0");
  RenyiKernels k_rs(rho, sigma);
  const RenyiKernels& k_sr = k_rs.swapped();

  double achievable = hoeffding_div(k_sr, Family::Petz, a);
  if (a <= hoeffding_div(k_rs, Family::ReverseSandwiched, big_l))
    achievable = std::max(achievable, hoeffding_div(k_sr, Family::Sandwiched, big_k));
  if (a <= hoeffding_div(k_rs, Family::Sandwiched, big_l))
    achievable = std::max(achievable, hoeffding_div(k_sr, Family::ReverseSandwiched, big_k));

  double converse = hoeffding_div(k_sr, Family::Petz, a);
  if (a <= hoeffding_div(k_rs, Family::Petz, big_l))
    converse = std::max(converse, hoeffding_div(k_sr, Family::Petz, big_k));
  return {achievable, converse};
}

double symmetric_boundary(const SymmetricQuery& q, const DensityMatrix& rho,
                          const DensityMatrix& sigma) {
  if (q.Z < 0.0) throw Error(ErrorKind::BadInput, "Z must be nonnegative");
  if (!(q.prior > 0.0 && q.prior < 1.0))
    throw Error(ErrorKind::BadInput, "prior must be strictly interior");
  RenyiKernels k_rs(rho, sigma);
  double i1 = symmetric_inf(k_rs, q.Z);
  double i2 = symmetric_inf(k_rs.swapped(), q.Z);
  return q.mode == SymmetricMode::Average ? std::max(i1, i2) : std::min(i1, i2);
}

std::optional<BoundaryKind> boundary_kind_from_string(const std::string& name) {
  if (name == "deterministic_hoeffding") return BoundaryKind::DeterministicHoeffding;
  if (name == "high_conclusiveness") return BoundaryKind::HighConclusiveness;
  if (name == "onesided") return BoundaryKind::Onesided;
  if (name == "conclusive_KL_slice") return BoundaryKind::ConclusiveKLSlice;
  if (name == "classical_reject") return BoundaryKind::ClassicalReject;
  if (name == "symmetric") return BoundaryKind::Symmetric;
  return std::nullopt;
}

RegionBoundary boundary_scan(BoundaryKind which, const BoundaryParams& params,
                             const DensityMatrix& rho, const DensityMatrix& sigma, int samples) {
  RegionBoundary out;

  if (which == BoundaryKind::Symmetric && params.fixed_z) {
    SymmetricQuery q{0.0, *params.fixed_z, 0.5, params.mode};
    out.samples.push_back({*params.fixed_z, symmetric_boundary(q, rho, sigma)});
    out.x_label = "Z";
    out.y_label = "E";
    out.meta = "symmetric boundary at fixed Z";
    return out;
  }

  if (samples < 2) throw Error(ErrorKind::BadInput, "samples must be at least 2");

  RenyiKernels k_rs(rho, sigma);
  const RenyiKernels& k_sr = k_rs.swapped();
  double d_rs = k_rs.kl();
  double d_sr = k_sr.kl();

  double x_max = 0.0;
  out.x_label = "A";
  out.y_label = "B";
  switch (which) {
    case BoundaryKind::DeterministicHoeffding:
      x_max = d_sr;
      out.meta = "B = H_A(sigma||rho), conventional achievable exponents";
      break;
    case BoundaryKind::HighConclusiveness:
      x_max = d_sr;
      out.meta = "rectangle A <= D(sigma||rho), B <= D(rho||sigma)";
      break;
    case BoundaryKind::Onesided:
      x_max = d_plus(sigma, rho);
      out.meta = "B = D(rho||sigma) - H*_A(sigma||rho)";
      break;
    case BoundaryKind::ConclusiveKLSlice:
      x_max = std::max(0.0, conclusive_inf(k_sr, params.L) - params.K);
      out.meta = "conclusive region slice at fixed (K, L)";
      break;
    case BoundaryKind::ClassicalReject:
      x_max = d_sr;
      out.meta = "classical reject-test boundary at fixed (K, L)";
      break;
    case BoundaryKind::Symmetric: {
      double d_xi = std::max(k_rs.dmax(), k_sr.dmax());
      x_max = 4.0 * d_xi;
      out.x_label = "Z";
      out.y_label = "E";
      out.meta = params.mode == SymmetricMode::Average ? "symmetric average-error boundary"
                                                       : "symmetric maximal-error boundary";
      break;
    }
  }
  if (params.x_max) x_max = *params.x_max;
  if (!(x_max > 0.0)) throw Error(ErrorKind::BadInput, "degenerate scan range");

  // classical vectors for the reject regime
  std::vector<double> pa, pb;
  if (which == BoundaryKind::ClassicalReject) {
    if (!commuting_classical_pair(rho, sigma, pa, pb))
      throw Error(ErrorKind::BadInput, "classical_reject requires commuting states");
  }

  double slice_b = 0.0;
  if (which == BoundaryKind::ConclusiveKLSlice)
    slice_b = std::max(0.0, conclusive_inf(k_rs, params.K) - params.L);

  out.samples.resize(static_cast<std::size_t>(samples));
  int clipped = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : clipped)
#endif
  for (int i = 0; i < samples; ++i) {
    double x = x_max * static_cast<double>(i) / (samples - 1);
    double y = 0.0;
    switch (which) {
      case BoundaryKind::DeterministicHoeffding:
        y = hoeffding_div(k_sr, Family::Petz, x);
        break;
      case BoundaryKind::HighConclusiveness:
        y = d_rs;
        break;
      case BoundaryKind::Onesided:
        y = d_rs - han_kobayashi_div(k_sr, x);
        break;
      case BoundaryKind::ConclusiveKLSlice:
        y = slice_b;
        break;
      case BoundaryKind::ClassicalReject: {
        ClassicalDistribution p{pa}, q{pb};
        y = classical_reject_region(x, params.K, params.L, p, q);
        break;
      }
      case BoundaryKind::Symmetric: {
        SymmetricQuery sq{0.0, x, 0.5, params.mode};
        y = symmetric_boundary(sq, rho, sigma);
        break;
      }
    }
    if (y < 0.0) { y = 0.0; ++clipped; }
    out.samples[static_cast<std::size_t>(i)] = {x, y};
  }
  if (clipped > 0) out.meta += " [clipped " + std::to_string(clipped) + " negative values to 0]";
  return out;
}

void RegionBoundary::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::BadInput, "cannot write " + path);
  f << "x,y\n";
  for (const RegionPoint& p : samples)
    f << format_seventeen(p.x) << "," << format_seventeen(p.y) << "\n";
}

std::string RegionBoundary::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const RegionPoint& p : samples) pts.push_back({p.x, p.y});
  nlohmann::json j{{"x_label", x_label}, {"y_label", y_label}, {"points", pts}, {"meta", meta}};
  return j.dump(2);
}

}  // namespace qht
