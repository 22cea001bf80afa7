#include "qht/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "qht/rng.hpp"
#include "qht/scalars.hpp"

namespace qht {

namespace {

constexpr double kSplitGap = 300.0;  // log-units; squared scale stays above DBL_MIN

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

std::vector<double> graded_sandwich_log_eigs(const std::vector<double>& c, const Matrix& w) {
  int n = w.dim();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return c[static_cast<std::size_t>(i)] > c[static_cast<std::size_t>(j)];
  });

  std::vector<double> cs(static_cast<std::size_t>(n));
  Matrix cur(n);
  for (int i = 0; i < n; ++i) {
    cs[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    for (int j = 0; j < n; ++j)
      cur(i, j) = w(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  int offset = 0;
  // `cur` always holds the Schur complement on indices [offset, n), re-based to 0.
  while (offset < n) {
    int end = offset + 1;
    while (end < n && cs[static_cast<std::size_t>(offset)] - cs[static_cast<std::size_t>(end)] <= kSplitGap)
      ++end;
    int nb = end - offset;
    int rest = n - end;
    double base = cs[static_cast<std::size_t>(offset)];

    if (nb == 1) {
      out.push_back(2.0 * base + std::log(std::max(cur(0, 0).real(), 1e-300)));
    } else if (nb == 2) {
      double d1 = cs[static_cast<std::size_t>(offset) + 1] - base;  // in (-kSplitGap, 0]
      double e1 = std::exp(d1);
      double m00 = cur(0, 0).real();
      double m11 = cur(1, 1).real() * e1 * e1;
      double cross = std::norm(cur(0, 1)) * e1 * e1;
      double t = m00 + m11;
      double disc = std::sqrt((m00 - m11) * (m00 - m11) + 4.0 * cross);
      double mu_plus = 0.5 * (t + disc);
      // the small eigenvalue through the determinant, which is exact in log form
      double det_bb = cur(0, 0).real() * cur(1, 1).real() - std::norm(cur(0, 1));
      double logdet = 2.0 * d1 + std::log(std::max(det_bb, 1e-300));
      double log_plus = std::log(std::max(mu_plus, 1e-300));
      out.push_back(2.0 * base + log_plus);
      out.push_back(2.0 * base + logdet - log_plus);
    } else {
      Matrix m(nb);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
          m(i, j) = cur(i, j) * std::exp(cs[static_cast<std::size_t>(offset + i)] - base) *
                    std::exp(cs[static_cast<std::size_t>(offset + j)] - base);
      HermitianSpectrum es = eig(m, 1e-6);
      for (double ev : es.eigenvalues) out.push_back(2.0 * base + std::log(std::max(ev, 1e-300)));
    }

    if (rest > 0) {
      Matrix bb(nb);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) bb(i, j) = cur(i, j);
      HermitianSpectrum ebb = eig(bb, 1e-6);
      std::vector<double> inv_vals(ebb.eigenvalues.size());
      for (std::size_t i = 0; i < inv_vals.size(); ++i)
        inv_vals[i] = 1.0 / std::max(ebb.eigenvalues[i], 1e-300);
      Matrix inv = ebb.apply(inv_vals);
      Matrix next(rest);
      for (int i = 0; i < rest; ++i)
        for (int j = 0; j < rest; ++j) {
          cplx s = cur(nb + i, nb + j);
          for (int k = 0; k < nb; ++k)
            for (int l = 0; l < nb; ++l) s -= cur(nb + i, k) * inv(k, l) * cur(l, nb + j);
          next(i, j) = s;
        }
      cur = next;
    }
    offset = end;
  }
  return out;
}

RenyiKernels::RenyiKernels(const DensityMatrix& x, const DensityMatrix& y) : x_(x), y_(y) {
  if (x.dim() != y.dim()) throw Error(ErrorKind::BadInput, "dimension mismatch");
  init_quantum();
}

RenyiKernels::RenyiKernels(const ClassicalDistribution& p, const ClassicalDistribution& q) {
  if (p.alphabet_size() != q.alphabet_size()) throw Error(ErrorKind::BadInput, "alphabet mismatch");
  classical_ = true;
  p_ = p.probs;
  q_ = q.probs;
}

void RenyiKernels::init_quantum() {
  const HermitianSpectrum& sx = x_.spectrum();
  const HermitianSpectrum& sy = y_.spectrum();
  int n = x_.dim();
  log_ex_.resize(static_cast<std::size_t>(n));
  log_ey_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    log_ex_[static_cast<std::size_t>(i)] = safe_log(sx.eigenvalues[static_cast<std::size_t>(i)]);
    log_ey_[static_cast<std::size_t>(i)] = safe_log(sy.eigenvalues[static_cast<std::size_t>(i)]);
  }
  overlap_.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int r = 0; r < n; ++r) s += std::conj(sx.eigenvectors(r, i)) * sy.eigenvectors(r, j);
      overlap_[static_cast<std::size_t>(i) * n + j] = std::norm(s);
    }
  // X expressed in the eigenbasis of Y, for the sandwiched family
  x_in_y_basis_ = Matrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int r = 0; r < n; ++r)
        for (int t = 0; t < n; ++t)
          s += std::conj(sy.eigenvectors(r, i)) * x_.mat()(r, t) * sy.eigenvectors(t, j);
      x_in_y_basis_(i, j) = s;
    }
}

double RenyiKernels::petz_log_trace(double s) const {
  std::vector<double> terms;
  if (classical_) {
    terms.reserve(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i) {
      double lp = safe_log(p_[i]), lq = safe_log(q_[i]);
      if (lp == kNegInf && s > 0.0) continue;
      if (lq == kNegInf) {
        if (s < 1.0) continue;          // q^(1-s) with positive exponent of zero
        return kPosInf;                 // zero to a negative power
      }
      terms.push_back(s * lp + (1.0 - s) * lq);
    }
  } else {
    int n = x_.dim();
    terms.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double w = overlap_[static_cast<std::size_t>(i) * n + j];
        if (w <= 0.0) continue;
        double lx = log_ex_[static_cast<std::size_t>(i)], ly = log_ey_[static_cast<std::size_t>(j)];
        if (lx == kNegInf && s > 0.0) continue;
        if (ly == kNegInf) {
          if (s < 1.0) continue;
          return kPosInf;
        }
        terms.push_back(std::log(w) + s * lx + (1.0 - s) * ly);
      }
  }
  return log_sum_exp(terms);
}

double RenyiKernels::petz(double s) const { return petz_log_trace(s) / (s - 1.0); }

double RenyiKernels::sandwiched(double s) const {
  if (classical_) return petz(s);  // commuting case
  int n = x_.dim();
  double a = (1.0 - s) / (2.0 * s);
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    if (log_ey_[static_cast<std::size_t>(j)] == kNegInf)
      throw Error(ErrorKind::RankDeficient, "sandwiched divergence needs a full-rank second argument");
    c[static_cast<std::size_t>(j)] = a * log_ey_[static_cast<std::size_t>(j)];
  }
  std::vector<double> log_mu = graded_sandwich_log_eigs(c, x_in_y_basis_);
  std::vector<double> terms(log_mu.size());
  for (std::size_t i = 0; i < log_mu.size(); ++i) terms[i] = s * log_mu[i];
  return log_sum_exp(terms) / (s - 1.0);
}

double RenyiKernels::reverse_sandwiched(double s) const {
  return s / (1.0 - s) * swapped().sandwiched(1.0 - s);
}

double RenyiKernels::kl() const {
  std::lock_guard<std::mutex> guard(lazy_mu_);
  if (kl_) return *kl_;
  double v = 0.0;
  if (classical_) {
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if (p_[i] <= 0.0) continue;
      if (q_[i] <= 0.0) { v = kPosInf; break; }
      v += p_[i] * (std::log(p_[i]) - std::log(q_[i]));
    }
  } else {
    int n = x_.dim();
    const std::vector<double>& ex = x_.spectrum().eigenvalues;
    for (int i = 0; i < n; ++i) {
      double l = ex[static_cast<std::size_t>(i)];
      if (l > 0.0) v += l * std::log(l);
    }
    for (int i = 0; i < n && v != kPosInf; ++i) {
      double l = ex[static_cast<std::size_t>(i)];
      if (l <= 0.0) continue;
      for (int j = 0; j < n; ++j) {
        double w = overlap_[static_cast<std::size_t>(i) * n + j];
        if (w <= 0.0) continue;
        if (log_ey_[static_cast<std::size_t>(j)] == kNegInf) { v = kPosInf; break; }
        v -= l * w * log_ey_[static_cast<std::size_t>(j)];
      }
    }
  }
  kl_ = v;
  return v;
}

double RenyiKernels::dmax() const {
  std::lock_guard<std::mutex> guard(lazy_mu_);
  if (dmax_) return *dmax_;
  double v;
  if (classical_) {
    v = kNegInf;
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if (p_[i] <= 0.0) continue;
      if (q_[i] <= 0.0) { v = kPosInf; break; }
      v = std::max(v, std::log(p_[i]) - std::log(q_[i]));
    }
  } else {
    if (!y_.full_rank())
      throw Error(ErrorKind::RankDeficient, "max-relative entropy needs a full-rank second argument");
    std::vector<double> inv_sqrt(y_.spectrum().eigenvalues.size());
    for (std::size_t i = 0; i < inv_sqrt.size(); ++i)
      inv_sqrt[i] = 1.0 / std::sqrt(y_.spectrum().eigenvalues[i]);
    Matrix ym = y_.spectrum().apply(inv_sqrt);
    HermitianSpectrum es = eig(ym * x_.mat() * ym, 1e-8);
    v = std::log(std::max(es.eigenvalues.front(), 1e-300));
  }
  dmax_ = v;
  return v;
}

double RenyiKernels::d0() const {
  if (classical_) {
    double t = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i)
      if (p_[i] > 0.0) t += q_[i];
    return -safe_log(t);
  }
  int n = x_.dim();
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    if (x_.spectrum().eigenvalues[static_cast<std::size_t>(i)] <= 1e-12) continue;
    for (int j = 0; j < n; ++j)
      t += overlap_[static_cast<std::size_t>(i) * n + j] *
           y_.spectrum().eigenvalues[static_cast<std::size_t>(j)];
  }
  return -safe_log(t);
}

const RenyiKernels& RenyiKernels::swapped() const {
  std::lock_guard<std::mutex> guard(lazy_mu_);
  if (!swapped_) {
    auto k = std::shared_ptr<RenyiKernels>(new RenyiKernels());
    if (classical_) {
      k->classical_ = true;
      k->p_ = q_;
      k->q_ = p_;
    } else {
      k->x_ = y_;
      k->y_ = x_;
      k->init_quantum();
    }
    swapped_ = k;
  }
  return *swapped_;
}

namespace {

void require_full_rank_pair(const DensityMatrix& rho, const DensityMatrix& sigma, const char* op) {
  if (!rho.full_rank() || !sigma.full_rank())
    throw Error(ErrorKind::RankDeficient, std::string(op) + " requires full-rank states");
}

}  // namespace

double renyi(const DivergenceFamily& family, const DensityMatrix& rho, const DensityMatrix& sigma) {
  double s = family.s;
  switch (family.tag) {
    case Family::Petz:
      if (!(s > 0.0 && s != 1.0 && s <= 2.0))
        throw Error(ErrorKind::UnsupportedOrder, "Petz order must lie in (0,1) u (1,2]");
      break;
    case Family::Sandwiched:
      if (!(s > 0.0 && s != 1.0 && std::isfinite(s)))
        throw Error(ErrorKind::UnsupportedOrder, "sandwiched order must lie in (0,1) u (1,inf)");
      break;
    case Family::ReverseSandwiched:
      if (!(s > 0.0 && s < 1.0))
        throw Error(ErrorKind::UnsupportedOrder, "reverse-sandwiched order must lie in (0,1)");
      break;
  }
  require_full_rank_pair(rho, sigma, "renyi");
  RenyiKernels k(rho, sigma);
  switch (family.tag) {
    case Family::Petz: return k.petz(s);
    case Family::Sandwiched: return k.sandwiched(s);
    case Family::ReverseSandwiched: return k.reverse_sandwiched(s);
  }
  return 0.0;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_full_rank_pair(rho, sigma, "relative_entropy");
  return RenyiKernels(rho, sigma).kl();
}

double max_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return RenyiKernels(rho, sigma).dmax();
}

double min_relative_entropy_zero(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return RenyiKernels(rho, sigma).d0();
}

double chernoff(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_full_rank_pair(rho, sigma, "chernoff");
  RenyiKernels k(rho, sigma);
  auto f = [&](double s) { return -k.petz_log_trace(s); };
  // both endpoint limits are zero for full-rank states
  return std::max(0.0, sup_unit_interval(f, 512, 0.0, 0.0));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  Matrix sqrt_sigma = matrix_power(sigma.mat(), 0.5);
  HermitianSpectrum es = eig(sqrt_sigma * rho.mat() * sqrt_sigma, 1e-8);
  double t = 0.0;
  for (double ev : es.eigenvalues) t += std::sqrt(std::max(ev, 0.0));
  return t * t;
}

ProjectiveMetrics projective_metrics(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_full_rank_pair(rho, sigma, "projective_metrics");
  RenyiKernels k(rho, sigma);
  double a = k.dmax();
  double b = k.swapped().dmax();
  return {a + b, std::max(a, b)};
}

DStarResult d_star_detailed(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_full_rank_pair(rho, sigma, "d_star");
  RenyiKernels sr(sigma, rho);
  auto e = [&](double eps) { return (1.0 - eps) / eps * sr.sandwiched(eps); };
  double g1 = e(1e-3), g2 = e(5e-4), g3 = e(2.5e-4);
  RichardsonResult r = richardson3(g1, g2, g3);
  DStarResult out;
  out.value = r.value;
  out.disagreement = r.disagreement;
  out.bracket_lo = -std::log(fidelity(rho, sigma));
  out.bracket_hi = RenyiKernels(rho, sigma).kl();
  out.bracket_ok = out.value >= out.bracket_lo - 1e-5 && out.value <= out.bracket_hi + 1e-5;
  return out;
}

double d_star(const DensityMatrix& rho, const DensityMatrix& sigma) {
  DStarResult r = d_star_detailed(rho, sigma);
  if (r.disagreement > 1e-5)
    throw Error(ErrorKind::ConvergenceFailure, "d_star extrapolants disagree beyond 1e-5");
  return r.value;
}

double measurement_kl(const Matrix& basis, const DensityMatrix& rho, const DensityMatrix& sigma) {
  int n = basis.dim();
  double v = 0.0;
  for (int x = 0; x < n; ++x) {
    cplx p = 0.0, q = 0.0;
    for (int r = 0; r < n; ++r)
      for (int t = 0; t < n; ++t) {
        cplx u = std::conj(basis(r, x)) * basis(t, x);
        p += u * rho.mat()(r, t);
        q += u * sigma.mat()(r, t);
      }
    double px = std::max(p.real(), 1e-300);
    double qx = std::max(q.real(), 1e-300);
    v += px * (std::log(px) - std::log(qx));
  }
  return v;
}

namespace {

// outcome probabilities of the rank-one measurement defined by basis columns
void outcome_probs(const Matrix& basis, const Matrix& state, std::vector<double>& out) {
  int n = basis.dim();
  out.resize(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    cplx p = 0.0;
    for (int r = 0; r < n; ++r)
      for (int t = 0; t < n; ++t) p += std::conj(basis(r, x)) * state(r, t) * basis(t, x);
    out[static_cast<std::size_t>(x)] = std::max(p.real(), 1e-300);
  }
}

double kl_terms(double p, double q) { return p * (std::log(p) - std::log(q)); }

// Gram-Schmidt orthonormalisation of the columns of g.
Matrix orthonormalize(Matrix g) {
  int n = g.dim();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) {
      cplx dot = 0.0;
      for (int r = 0; r < n; ++r) dot += std::conj(g(r, k)) * g(r, j);
      for (int r = 0; r < n; ++r) g(r, j) -= dot * g(r, k);
    }
    double nrm = 0.0;
    for (int r = 0; r < n; ++r) nrm += std::norm(g(r, j));
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) { g(j, j) += 1.0; nrm = 1.0; }
    for (int r = 0; r < n; ++r) g(r, j) /= nrm;
  }
  return g;
}

struct RefineResult {
  Matrix basis;
  double value;
  bool converged;
};

RefineResult refine_basis(Matrix basis, const DensityMatrix& rho, const DensityMatrix& sigma,
                          int max_sweeps) {
  int n = basis.dim();
  std::vector<double> p, q;
  outcome_probs(basis, rho.mat(), p);
  outcome_probs(basis, sigma.mat(), q);
  double value = 0.0;
  for (int x = 0; x < n; ++x) value += kl_terms(p[static_cast<std::size_t>(x)], q[static_cast<std::size_t>(x)]);

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double start = value;
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 1; j < n; ++j) {
        // compressed 2x2 blocks in the (u_i, u_j) plane
        cplx rij = 0.0, sij = 0.0;
        double rii = p[static_cast<std::size_t>(i)], rjj = p[static_cast<std::size_t>(j)];
        double sii = q[static_cast<std::size_t>(i)], sjj = q[static_cast<std::size_t>(j)];
        for (int r = 0; r < n; ++r)
          for (int t = 0; t < n; ++t) {
            cplx u = std::conj(basis(r, i)) * basis(t, j);
            rij += u * rho.mat()(r, t);
            sij += u * sigma.mat()(r, t);
          }
        double rest = value - kl_terms(rii, sii) - kl_terms(rjj, sjj);
        for (double phi : {0.0, 1.5707963267948966}) {
          cplx ph(std::cos(phi), std::sin(phi));
          auto local = [&](double th) {
            double cth = std::cos(th), sth = std::sin(th);
            double cross_r = 2.0 * cth * sth * (ph * rij).real();
            double cross_s = 2.0 * cth * sth * (ph * sij).real();
            double pi2 = std::max(cth * cth * rii + sth * sth * rjj + cross_r, 1e-300);
            double pj2 = std::max(sth * sth * rii + cth * cth * rjj - cross_r, 1e-300);
            double qi2 = std::max(cth * cth * sii + sth * sth * sjj + cross_s, 1e-300);
            double qj2 = std::max(sth * sth * sii + cth * cth * sjj - cross_s, 1e-300);
            return kl_terms(pi2, qi2) + kl_terms(pj2, qj2);
          };
          double th = golden_max(local, -0.7853981633974483, 0.7853981633974483, 1e-12);
          double candidate = rest + local(th);
          if (candidate > value + 1e-15) {
            // apply the rotation u_i' = c u_i + s ph* u_j ; u_j' = -s ph u_i + c u_j
            double cth = std::cos(th), sth = std::sin(th);
            for (int r = 0; r < n; ++r) {
              cplx ui = basis(r, i), uj = basis(r, j);
              basis(r, i) = cth * ui + sth * std::conj(ph) * uj;
              basis(r, j) = -sth * ph * ui + cth * uj;
            }
            outcome_probs(basis, rho.mat(), p);
            outcome_probs(basis, sigma.mat(), q);
            value = 0.0;
            for (int x = 0; x < n; ++x)
              value += kl_terms(p[static_cast<std::size_t>(x)], q[static_cast<std::size_t>(x)]);
            rii = p[static_cast<std::size_t>(i)]; rjj = p[static_cast<std::size_t>(j)];
            sii = q[static_cast<std::size_t>(i)]; sjj = q[static_cast<std::size_t>(j)];
            rij = sij = 0.0;
            for (int r = 0; r < n; ++r)
              for (int t = 0; t < n; ++t) {
                cplx u = std::conj(basis(r, i)) * basis(t, j);
                rij += u * rho.mat()(r, t);
                sij += u * sigma.mat()(r, t);
              }
            rest = value - kl_terms(rii, sii) - kl_terms(rjj, sjj);
          }
        }
      }
    }
    if (value - start < 1e-13) { converged = true; break; }
  }
  return {basis, value, converged};
}

}  // namespace

MeasuredResult measured_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                                         const MeasuredOptions& opts) {
  require_full_rank_pair(rho, sigma, "measured_relative_entropy");
  if (rho.dim() > 8)
    throw Error(ErrorKind::DimensionBudget, "measured relative entropy optimizer supports d <= 8");
  int n = rho.dim();

  // commuting states: the joint eigenbasis is exactly optimal
  Matrix joint;
  if (commuting_joint_basis(rho, sigma, joint)) {
    double v = measurement_kl(joint, rho, sigma);
    return {v, joint, true};
  }

  std::vector<Matrix> starts;
  starts.push_back(rho.spectrum().eigenvectors);
  starts.push_back(sigma.spectrum().eigenvectors);
  starts.push_back(eig(rho.mat() - sigma.mat(), 1e-8).eigenvectors);
  CounterRng rng(opts.seed);
  for (int r = 0; r < opts.restarts; ++r) {
    Matrix g(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        g(i, j) = cplx(rng.normal(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(i * n + j), 0),
                       rng.normal(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(i * n + j), 2));
    starts.push_back(orthonormalize(g));
  }

  MeasuredResult best{kNegInf, Matrix::identity(n), false};
  for (const Matrix& s0 : starts) {
    RefineResult r = refine_basis(s0, rho, sigma, opts.max_sweeps);
    if (r.value > best.value) best = {r.value, r.basis, r.converged};
  }
  return best;
}

}  // namespace qht
