#include "qht/verify.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "qht/divergences.hpp"
#include "qht/pinching.hpp"
#include "qht/regions.hpp"
#include "qht/rng.hpp"
#include "qht/scalars.hpp"
#include "qht/sequential.hpp"
#include "qht/types_engine.hpp"

namespace qht::verify {

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
  std::string name;
  double measured;
  double bound;
  std::string cmp;  // "<=", ">=", "|d|<="
  bool pass;
  bool informational = false;
};

struct Criterion {
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool pass() const {
    for (const Check& c : checks)
      if (!c.pass && !c.informational) return false;
    return true;
  }
};

// measured <= bound (+tol folded into bound by the caller)
void le(Criterion& c, const std::string& name, double measured, double bound, bool info = false) {
  c.checks.push_back({name, measured, bound, "<=", measured <= bound, info});
}
void ge(Criterion& c, const std::string& name, double measured, double bound, bool info = false) {
  c.checks.push_back({name, measured, bound, ">=", measured >= bound, info});
}
void near(Criterion& c, const std::string& name, double measured, double expected, double tol,
          bool info = false) {
  c.checks.push_back({name, measured, expected, "within " + std::to_string(tol) + " of",
                      std::abs(measured - expected) <= tol, info});
}

void print(std::ostream& out, const Criterion& c) {
  out << "[" << c.title << "]\n";
  for (const Check& k : c.checks) {
    out << "    " << std::left << std::setw(52) << k.name << std::right << std::scientific
        << std::setprecision(6) << " measured=" << std::setw(14) << k.measured << "  " << k.cmp
        << " " << std::setw(14) << k.bound << "  " << (k.pass ? "pass" : "FAIL")
        << (k.informational ? " (informational)" : "") << "\n";
  }
  out << "  => " << (c.pass() ? "PASS" : "FAIL") << std::fixed << std::setprecision(1) << " ("
      << c.seconds << " s)\n";
}

// ---------------- fixtures --------------------------------------------

DensityMatrix fixed_rho() {
  Matrix m(2);
  m(0, 0) = 0.5;
  m(0, 1) = 0.25;
  m(1, 0) = 0.25;
  m(1, 1) = 0.5;
  return validate_state(m);
}
DensityMatrix fixed_sigma() { return validate_state(Matrix::diag({0.75, 0.25})); }

DensityMatrix bernoulli_state(double p) {
  return embed_diagonal(ClassicalDistribution::bernoulli(p));
}

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

ClassicalDistribution random_distribution(const CounterRng& rng, std::uint64_t i,
                                          std::uint64_t lane0, int k) {
  std::vector<double> p(static_cast<std::size_t>(k));
  double s = 0.0;
  for (int j = 0; j < k; ++j) {
    p[static_cast<std::size_t>(j)] = 0.05 + rng.uniform(i, static_cast<std::uint64_t>(j), lane0);
    s += p[static_cast<std::size_t>(j)];
  }
  for (double& v : p) v /= s;
  return {p};
}

// independent scalar formulas for the classical-embedding cross-checks
double scalar_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) v += p[i] * (std::log(p[i]) - std::log(q[i]));
  return v;
}
double scalar_renyi(const std::vector<double>& p, const std::vector<double>& q, double s) {
  double t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) t += std::pow(p[i], s) * std::pow(q[i], 1.0 - s);
  return std::log(t) / (s - 1.0);
}
double scalar_dmax(const std::vector<double>& p, const std::vector<double>& q) {
  double m = kNegInf;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) m = std::max(m, std::log(p[i] / q[i]));
  return m;
}
double scalar_bhattacharyya_fid(const std::vector<double>& p, const std::vector<double>& q) {
  double t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) t += std::sqrt(p[i] * q[i]);
  return t * t;
}

// ---------------- criteria --------------------------------------------

Criterion criterion1() {
  Criterion c;
  c.title = "criterion 1: divergence suite, 200 random qubit pairs";
  auto tic = Clock::now();
  CounterRng rng(0xACCE11ED);

  double worst_alt = kNegInf, worst_fid = kNegInf, worst_ch_sym = kNegInf, worst_ch_bound = kNegInf;
  double worst_dmax = kNegInf, worst_ds_lo = kNegInf, worst_ds_hi = kNegInf, worst_embed = kNegInf;
  for (int i = 0; i < 200; ++i) {
    DensityMatrix r = random_qubit(rng, static_cast<std::uint64_t>(i), 0);
    DensityMatrix s = random_qubit(rng, static_cast<std::uint64_t>(i), 16);
    RenyiKernels k(r, s);
    for (double sv : {0.3, 0.7, 1.3, 1.9})
      worst_alt = std::max(worst_alt, k.sandwiched(sv) - k.petz(sv));
    worst_fid = std::max(worst_fid, std::abs(k.sandwiched(0.5) + std::log(fidelity(r, s))));
    double c1 = chernoff(r, s);
    worst_ch_sym = std::max(worst_ch_sym, std::abs(c1 - chernoff(s, r)));
    worst_ch_bound = std::max(worst_ch_bound, c1 - 0.5 * std::max(k.kl(), k.swapped().kl()));
    worst_dmax = std::max(worst_dmax, k.kl() - k.dmax());
    DStarResult ds = d_star_detailed(r, s);
    worst_ds_lo = std::max(worst_ds_lo, ds.bracket_lo - ds.value);
    worst_ds_hi = std::max(worst_ds_hi, ds.value - ds.bracket_hi);

    // scalar-formula cross-check on the diagonal embedding
    ClassicalDistribution p = random_distribution(rng, static_cast<std::uint64_t>(i), 40, 2);
    ClassicalDistribution q = random_distribution(rng, static_cast<std::uint64_t>(i), 48, 2);
    RenyiKernels ke(embed_diagonal(p), embed_diagonal(q));
    worst_embed = std::max({worst_embed,
                            std::abs(ke.kl() - scalar_kl(p.probs, q.probs)),
                            std::abs(ke.petz(0.5) - scalar_renyi(p.probs, q.probs, 0.5)),
                            std::abs(ke.sandwiched(1.7) - scalar_renyi(p.probs, q.probs, 1.7)),
                            std::abs(ke.dmax() - scalar_dmax(p.probs, q.probs)),
                            std::abs(fidelity(embed_diagonal(p), embed_diagonal(q)) -
                                     scalar_bhattacharyya_fid(p.probs, q.probs))});
  }
  le(c, "sandwiched <= Petz (ALT), worst excess", worst_alt, 1e-9);
  le(c, "|tilde D_1/2 + log F|", worst_fid, 1e-8);
  le(c, "Chernoff argument symmetry", worst_ch_sym, 1e-8);
  le(c, "Chernoff <= max(D,D)/2, worst excess", worst_ch_bound, 1e-9);
  le(c, "D <= D_max, worst excess", worst_dmax, 1e-9);
  le(c, "D* bracket: -logF - D*, worst", worst_ds_lo, 1e-5);
  le(c, "D* bracket: D* - D, worst", worst_ds_hi, 1e-5);
  le(c, "diagonal embeddings match scalar formulas", worst_embed, 1e-10);
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  le(c, "runtime seconds", c.seconds, 60.0);
  return c;
}

Criterion criterion2() {
  Criterion c;
  c.title = "criterion 2: conclusive region reduces to the rectangle at K=L=0";
  auto tic = Clock::now();
  CounterRng rng(0x2E610);

  std::int64_t mismatches = 0, guarded = 0;
  double worst_ab = kNegInf;
  for (int i = 0; i < 50; ++i) {
    DensityMatrix r = random_qubit(rng, static_cast<std::uint64_t>(i), 0);
    DensityMatrix s = random_qubit(rng, static_cast<std::uint64_t>(i), 16);
    auto [c1, c2] = conclusive_thresholds(0.0, 0.0, r, s);
    double d_sr = relative_entropy(s, r), d_rs = relative_entropy(r, s);
    for (int ai = 0; ai < 50; ++ai) {
      for (int bi = 0; bi < 50; ++bi) {
        double a = 1.2 * d_sr * ai / 49.0;
        double b = 1.2 * d_rs * bi / 49.0;
        if (std::abs(a - d_sr) < 1e-6 || std::abs(b - d_rs) < 1e-6) {
          ++guarded;  // boundary guard band
          continue;
        }
        bool by_op = a <= c1 && b <= c2;
        bool by_rect = a <= d_sr && b <= d_rs;
        if (by_op != by_rect) ++mismatches;
      }
    }
    // exercise the full operation on a diagonal of the grid
    for (int t = 0; t < 10; ++t) {
      double a = 1.2 * d_sr * t / 9.0, b = 1.2 * d_rs * t / 9.0;
      if (std::abs(a - d_sr) < 1e-6 || std::abs(b - d_rs) < 1e-6) continue;
      ConclusiveRegionResult res = conclusive_region({a, b, 0.0, 0.0}, r, s);
      if (res.inside != (a <= d_sr && b <= d_rs)) ++mismatches;
    }
  }
  le(c, "rectangle mismatches over 50 pairs x 50x50 grid", static_cast<double>(mismatches), 0.0);

  // A+B <= D_Omega along every sampled (A,B)-regime boundary
  DensityMatrix bp = bernoulli_state(0.9), bq = bernoulli_state(0.2);
  std::vector<std::pair<DensityMatrix, DensityMatrix>> pairs{{bp, bq}};
  for (int i = 0; i < 5; ++i)
    pairs.emplace_back(random_qubit(rng, static_cast<std::uint64_t>(100 + i), 0),
                       random_qubit(rng, static_cast<std::uint64_t>(100 + i), 16));
  for (const auto& [r, s] : pairs) {
    double d_omega = projective_metrics(r, s).d_omega;
    BoundaryParams params;
    params.K = bits_to_nats(0.1);
    params.L = bits_to_nats(0.1);
    std::vector<BoundaryKind> kinds{BoundaryKind::DeterministicHoeffding,
                                    BoundaryKind::HighConclusiveness, BoundaryKind::Onesided,
                                    BoundaryKind::ConclusiveKLSlice};
    std::vector<double> pa, pb;
    if (commuting_classical_pair(r, s, pa, pb)) kinds.push_back(BoundaryKind::ClassicalReject);
    for (BoundaryKind kind : kinds) {
      RegionBoundary rb = boundary_scan(kind, params, r, s, 64);
      for (const RegionPoint& pt : rb.samples)
        worst_ab = std::max(worst_ab, pt.x + pt.y - d_omega);
    }
  }
  le(c, "boundary points: A+B - D_Omega, worst", worst_ab, 1e-6);
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  return c;
}

Criterion criterion3() {
  Criterion c;
  c.title = "criterion 3: Hoeffding inverse identity";
  auto tic = Clock::now();
  CounterRng rng(0x1D3);
  double worst = kNegInf;
  std::vector<std::pair<ClassicalDistribution, ClassicalDistribution>> pairs;
  pairs.emplace_back(ClassicalDistribution::bernoulli(0.9), ClassicalDistribution::bernoulli(0.2));
  for (int i = 0; i < 10; ++i) {
    int k = 2 + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(i), 99) * 3);
    pairs.emplace_back(random_distribution(rng, static_cast<std::uint64_t>(i), 0, k),
                       random_distribution(rng, static_cast<std::uint64_t>(i), 8, k));
  }
  for (const auto& [p, q] : pairs) {
    RenyiKernels kpq(p, q);
    const RenyiKernels& kqp = kpq.swapped();
    double dqp = kqp.kl();
    for (int j = 1; j <= 10; ++j) {
      double r = dqp * j / 11.0;
      double h = hoeffding_div(kqp, Family::Petz, r);
      worst = std::max(worst, std::abs(hoeffding_div(kpq, Family::Petz, h) - r));
    }
  }
  le(c, "|H_{H_R(Q||P)}(P||Q) - R|, worst over 11 pairs", worst, 1e-5);
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  return c;
}

Criterion criterion4() {
  Criterion c;
  c.title = "criterion 4: Han-Kobayashi linear regime";
  auto tic = Clock::now();
  CounterRng rng(0x4A17);
  double worst = kNegInf;
  for (int i = 0; i < 20; ++i) {
    DensityMatrix r = random_qubit(rng, static_cast<std::uint64_t>(i), 0);
    DensityMatrix s = random_qubit(rng, static_cast<std::uint64_t>(i), 16);
    RenyiKernels k(r, s);
    double thr = han_kobayashi_linear_threshold_div(k);
    double rr = thr + 0.5;
    worst = std::max(worst, std::abs(han_kobayashi_div(k, rr) - (rr - k.dmax())));
  }
  le(c, "|H*_R - (R - D_max)| at R = threshold + 0.5", worst, 1e-6);
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  return c;
}

Criterion criterion5() {
  Criterion c;
  c.title = "criterion 5: classical boundary endpoints, Bernoulli(0.9)/(0.2)";
  auto tic = Clock::now();
  DensityMatrix p = bernoulli_state(0.9), q = bernoulli_state(0.2);

  RegionBoundary det = boundary_scan(BoundaryKind::DeterministicHoeffding, {}, p, q, 256);
  near(c, "deterministic curve y(0) [bits]", nats_to_bits(det.samples.front().y), 1.652933, 1e-4);
  near(c, "deterministic curve x at B=0 [bits]", nats_to_bits(det.samples.back().x), 1.966015, 1e-4);
  le(c, "deterministic curve y at right endpoint [bits]", nats_to_bits(det.samples.back().y), 1e-4);

  RegionBoundary rect = boundary_scan(BoundaryKind::HighConclusiveness, {}, p, q, 16);
  near(c, "rectangle corner x [bits]", nats_to_bits(rect.samples.back().x), 1.966015, 1e-6);
  near(c, "rectangle corner y [bits]", nats_to_bits(rect.samples.back().y), 1.652933, 1e-6);

  RegionBoundary one = boundary_scan(BoundaryKind::Onesided, {}, p, q, 256);
  double worst_flat = kNegInf;
  for (const RegionPoint& pt : one.samples)
    if (pt.x <= bits_to_nats(1.966015))
      worst_flat = std::max(worst_flat, std::abs(nats_to_bits(pt.y) - 1.652933));
  le(c, "one-sided curve flat at 1.652933 for A <= 1.966015", worst_flat, 1e-4);
  double dp = d_plus(q, p);
  le(c, "one-sided B at A = d_plus [bits]", nats_to_bits(onesided_boundary(dp, p, q)), 1e-4);
  near(c, "d_plus [bits]", nats_to_bits(dp), 4.652933, 1e-4);
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  return c;
}

Criterion criterion6() {
  Criterion c;
  c.title = "criterion 6: exact classical typicality test convergence";
  auto tic = Clock::now();
  ClassicalDistribution p = ClassicalDistribution::bernoulli(0.9);
  ClassicalDistribution q = ClassicalDistribution::bernoulli(0.2);
  const double d_pq = 1.652933, d_qp = 1.966015;

  double gap_b_200 = 0.0, gap_a_200 = 0.0, gap_b_2000 = 0.0, gap_a_2000 = 0.0;
  double pi_p = 0.0, pi_q = 0.0;
  for (std::int64_t n : {200, 500, 1000, 2000}) {
    double delta = std::pow(static_cast<double>(n), -1.0 / 3.0);
    types::TestStatistics st = types::eval_stein_test(p, q, n, delta);
    double be = nats_to_bits(-st.log_beta_bar / static_cast<double>(n));
    double ae = nats_to_bits(-st.log_alpha_bar / static_cast<double>(n));
    if (n == 200) {
      gap_b_200 = std::abs(be - d_pq);
      gap_a_200 = std::abs(ae - d_qp);
    }
    if (n == 2000) {
      gap_b_2000 = std::abs(be - d_pq);
      gap_a_2000 = std::abs(ae - d_qp);
      pi_p = std::exp(st.log_pi_P);
      pi_q = std::exp(st.log_pi_Q);
    }
  }
  le(c, "n=2000: |beta exponent - D(P||Q)| / D(P||Q)", gap_b_2000 / d_pq, 0.15);
  le(c, "n=2000: |alpha exponent - D(Q||P)| / D(Q||P)", gap_a_2000 / d_qp, 0.15);
  ge(c, "n=2000: pi(P)", pi_p, 0.99);
  ge(c, "n=2000: pi(Q)", pi_q, 0.99);
  le(c, "beta gap at n=2000 vs n=200", gap_b_2000, gap_b_200);
  le(c, "alpha gap at n=2000 vs n=200", gap_a_2000, gap_a_200);

  // The 15% targets are not reachable under the delta_n = n^(-1/3) schedule:
  // the accept-rho ball then has sup-radius 0.0794 at n=2000 and the exact
  // beta exponent equals the ball-corner divergence 1.2844 bits (22% short).
  // A faster-shrinking schedule that still satisfies the typicality
  // requirements shows the machinery converging as intended.
  for (std::int64_t n : {200, 2000}) {
    double delta = std::pow(static_cast<double>(n), -0.45);
    types::TestStatistics st = types::eval_stein_test(p, q, n, delta);
    double be = nats_to_bits(-st.log_beta_bar / static_cast<double>(n));
    double ae = nats_to_bits(-st.log_alpha_bar / static_cast<double>(n));
    if (n == 2000) {
      le(c, "n=2000, delta=n^-0.45: beta gap fraction", std::abs(be - d_pq) / d_pq, 0.15, true);
      le(c, "n=2000, delta=n^-0.45: alpha gap fraction", std::abs(ae - d_qp) / d_qp, 0.15, true);
    }
  }
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  le(c, "runtime seconds", c.seconds, 120.0);
  return c;
}

Criterion criterion7() {
  Criterion c;
  c.title = "criterion 7: exact classical reject test";
  auto tic = Clock::now();
  ClassicalDistribution p = ClassicalDistribution::bernoulli(0.9);
  ClassicalDistribution q = ClassicalDistribution::bernoulli(0.2);
  const std::int64_t n = 2000;
  double big_k = bits_to_nats(0.1), big_l = bits_to_nats(0.1);

  types::TestStatistics st = types::eval_reject_test(p, q, n, big_k, big_l);
  ge(c, "inconclusiveness exponent under P [bits]",
     nats_to_bits(-st.log_incon_P / static_cast<double>(n)), 0.09);
  ge(c, "inconclusiveness exponent under Q [bits]",
     nats_to_bits(-st.log_incon_Q / static_cast<double>(n)), 0.09);

  RenyiKernels kpq(p, q);
  double h_l = hoeffding_div(kpq, Family::Petz, big_l);

  // branch K <= A <= H_L: prediction H_K(Q||P), the (K, L) test achieves it
  double pred_mid = classical_reject_region(bits_to_nats(1.0), big_k, big_l, p, q);
  double meas_mid = -st.log_beta_bar / static_cast<double>(n);
  le(c, "branch K<=A<=H_L: |measured/predicted - 1|", std::abs(meas_mid / pred_mid - 1.0), 0.10);

  // branch A < K: the degenerate reject test with radius H_A is deterministic
  double a_low = bits_to_nats(0.05);
  double pred_low = classical_reject_region(a_low, big_k, big_l, p, q);
  types::TestStatistics st_low = types::eval_reject_test(p, q, n, a_low, pred_low);
  double meas_low = -st_low.log_beta_bar / static_cast<double>(n);
  le(c, "branch A<K: |measured/predicted - 1|", std::abs(meas_low / pred_low - 1.0), 0.10);

  // branch A > H_L
  double a_high = h_l + bits_to_nats(0.15);
  double pred_high = classical_reject_region(a_high, big_k, big_l, p, q);
  types::TestStatistics st_high = types::eval_reject_test(p, q, n, a_high, pred_high);
  double meas_high = -st_high.log_beta_bar / static_cast<double>(n);
  le(c, "branch A>H_L: |measured/predicted - 1|", std::abs(meas_high / pred_high - 1.0), 0.10);
  le(c, "branch A>H_L: alpha exponent covers A, |ratio - 1|",
     std::abs((-st_high.log_alpha_bar / static_cast<double>(n)) / a_high - 1.0), 0.10);
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  return c;
}

void sequential_half(Criterion& c, const std::string& tag, const DensityMatrix& rho,
                     const DensityMatrix& sigma) {
  seq::MeasurementPair pair = seq::optimal_measurements(rho, sigma);
  seq::ProtocolConfig cfg = seq::make_config(pair, 400, bits_to_nats(0.3), 0x5EED, 100000);
  seq::SequentialReport r = seq::estimate_statistics(pair, cfg);
  double trials = static_cast<double>(cfg.trials);

  le(c, tag + ": inconclusive fraction under rho",
     static_cast<double>(r.under_rho.inconclusive) / trials, 0.02);
  le(c, tag + ": inconclusive fraction under sigma",
     static_cast<double>(r.under_sigma.inconclusive) / trials, 0.02);
  double b1 = r.expected_type1_bound + 3.0 * std::sqrt(r.expected_type1_bound);
  double b2 = r.expected_type2_bound + 3.0 * std::sqrt(r.expected_type2_bound);
  le(c, tag + ": type-I errors vs analytic bound", static_cast<double>(r.under_rho.errors), b1);
  le(c, tag + ": type-II errors vs analytic bound", static_cast<double>(r.under_sigma.errors), b2);
  le(c, tag + ": |mean S/n - D_M(rho||sigma)| [bits]",
     std::abs(nats_to_bits(r.mean_s_rho - pair.achieved_fwd)), 0.05);
  le(c, tag + ": |mean S/n + D_M(sigma||rho)| [bits]",
     std::abs(nats_to_bits(r.mean_s_sigma + pair.achieved_rev)), 0.05);
}

Criterion criterion8() {
  Criterion c;
  c.title = "criterion 8: sequential protocol, n=400, eps=0.3 bits, 1e5 trials";
  auto tic = Clock::now();
  sequential_half(c, "commuting", bernoulli_state(0.9), bernoulli_state(0.2));
  sequential_half(c, "non-commuting", fixed_rho(), fixed_sigma());
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  le(c, "runtime seconds", c.seconds, 120.0);
  return c;
}

Criterion criterion9() {
  Criterion c;
  c.title = "criterion 9: pinching convergence, fixed qubit pair";
  auto tic = Clock::now();
  DensityMatrix rho = fixed_rho(), sigma = fixed_sigma();
  int d = rho.dim();

  for (double s : {0.7, 1.0}) {
    double target = pinched_renyi_target(s, rho, sigma, PinchDirection::PinchFirstArg);
    double worst_lo = kNegInf, worst_bound = kNegInf, worst_mono = kNegInf;
    double prev_gap = kPosInf;
    for (int k = 1; k <= 8; ++k) {
      double gap = target - pinched_renyi_rate(s, rho, sigma, k, PinchDirection::PinchFirstArg);
      worst_lo = std::max(worst_lo, -gap);
      worst_bound = std::max(worst_bound, gap - d * std::log(k + 1.0) / k);
      worst_mono = std::max(worst_mono, gap - prev_gap);
      prev_gap = gap;
    }
    std::string ss = "s=" + std::to_string(s).substr(0, 3);
    le(c, ss + ": gap >= 0, worst -gap", worst_lo, 1e-9);
    le(c, ss + ": gap <= d log(k+1)/k, worst excess", worst_bound, 0.0);
    le(c, ss + ": gap nonincreasing in k, worst increase", worst_mono, 1e-9);
  }

  double a = bits_to_nats(0.15);  // inside the validity window (0, D*) of both directions
  for (PinchDirection dir : {PinchDirection::PinchFirstArg, PinchDirection::PinchSecondArg}) {
    double target = pinched_hoeffding_target(a, rho, sigma, dir);
    double prev = kNegInf, worst_mono = kNegInf, worst_hi = kNegInf;
    for (int k = 1; k <= 6; ++k) {
      double rate = pinched_hoeffding_rate(a, rho, sigma, k, dir);
      worst_mono = std::max(worst_mono, prev - rate);
      worst_hi = std::max(worst_hi, rate - target);
      prev = rate;
    }
    std::string ss = dir == PinchDirection::PinchFirstArg ? "sandwiched-target" : "reverse-target";
    le(c, "hoeffding rates nondecreasing (" + ss + ")", worst_mono, 1e-9);
    le(c, "hoeffding rates below target (" + ss + ")", worst_hi, 1e-9);
  }
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  return c;
}

Criterion criterion10() {
  Criterion c;
  c.title = "criterion 10: symmetric boundaries";
  auto tic = Clock::now();
  CounterRng rng(0x5711);
  std::vector<std::pair<DensityMatrix, DensityMatrix>> pairs{
      {bernoulli_state(0.9), bernoulli_state(0.2)}};
  for (int i = 0; i < 10; ++i)
    pairs.emplace_back(random_qubit(rng, static_cast<std::uint64_t>(i), 0),
                       random_qubit(rng, static_cast<std::uint64_t>(i), 16));

  double worst_avg = kNegInf, worst_maxm = kNegInf, worst_xi = kNegInf, worst_mono = kNegInf;
  for (const auto& [r, s] : pairs) {
    double d_rs = relative_entropy(r, s), d_sr = relative_entropy(s, r);
    double avg0 = symmetric_boundary({0.0, 0.0, 0.5, SymmetricMode::Average}, r, s);
    double max0 = symmetric_boundary({0.0, 0.0, 0.5, SymmetricMode::Maximal}, r, s);
    worst_avg = std::max(worst_avg, std::abs(avg0 - std::max(d_rs, d_sr)));
    worst_maxm = std::max(worst_maxm, std::abs(max0 - std::min(d_rs, d_sr)));
    double d_xi = projective_metrics(r, s).d_xi;
    double big = symmetric_boundary({0.0, bits_to_nats(100.0), 0.5, SymmetricMode::Average}, r, s);
    worst_xi = std::max(worst_xi, std::abs(big - d_xi));
    double prev = kNegInf;
    for (int j = 0; j < 20; ++j) {
      double z = 3.0 * d_xi * j / 19.0;
      double e = symmetric_boundary({0.0, z, 0.5, SymmetricMode::Average}, r, s);
      worst_mono = std::max(worst_mono, prev - e);
      prev = e;
    }
  }
  le(c, "Z=0 average = max(D, D), worst deviation", worst_avg, 1e-8);
  le(c, "Z=0 maximal = min(D, D), worst deviation", worst_maxm, 1e-8);
  le(c, "Z=100 bits vs D_Xi, worst deviation", worst_xi, 1e-3);
  le(c, "nondecreasing in Z, worst decrease", worst_mono, 1e-9);
  c.seconds = std::chrono::duration<double>(Clock::now() - tic).count();
  return c;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"divergences", "regions", "classical", "sequential", "pinching", "all"};
}

bool is_suite(const std::string& name) {
  for (const std::string& s : suite_names())
    if (s == name) return true;
  return false;
}

nlohmann::json to_json(const Criterion& c) {
  nlohmann::json checks = nlohmann::json::array();
  for (const Check& k : c.checks)
    checks.push_back({{"name", k.name},
                      {"measured", k.measured},
                      {"comparison", k.cmp},
                      {"bound", k.bound},
                      {"pass", k.pass},
                      {"informational", k.informational}});
  return {{"title", c.title}, {"pass", c.pass()}, {"seconds", c.seconds}, {"checks", checks}};
}

bool run_suite(const std::string& name, std::ostream& out, bool as_json) {
  std::vector<Criterion (*)()> fns;
  auto add = [&](std::initializer_list<Criterion (*)()> list) {
    for (auto f : list) fns.push_back(f);
  };
  if (name == "divergences")
    add({criterion1});
  else if (name == "regions")
    add({criterion2, criterion3, criterion4, criterion5, criterion10});
  else if (name == "classical")
    add({criterion6, criterion7});
  else if (name == "sequential")
    add({criterion8});
  else if (name == "pinching")
    add({criterion9});
  else if (name == "all")
    add({criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7,
         criterion8, criterion9, criterion10});
  else
    throw Error(ErrorKind::BadInput, "unknown suite " + name);

  bool all_pass = true;
  int passed = 0;
  nlohmann::json criteria = nlohmann::json::array();
  for (auto f : fns) {
    Criterion c = f();
    if (as_json)
      criteria.push_back(to_json(c));
    else
      print(out, c);
    if (c.pass())
      ++passed;
    else
      all_pass = false;
  }
  if (as_json) {
    nlohmann::json j{{"suite", name}, {"criteria", criteria}, {"passed", passed},
                     {"total", fns.size()}, {"pass", all_pass}};
    out << j.dump(2) << "\n";
  } else {
    out << "==> " << passed << "/" << fns.size() << " criteria passed\n";
  }
  return all_pass;
}

}  // namespace qht::verify
