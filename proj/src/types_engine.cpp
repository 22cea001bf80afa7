#include "qht/types_engine.hpp"

#include <algorithm>
#include <cmath>

#include "qht/parallel.hpp"
#include "qht/regions.hpp"
#include "qht/scalars.hpp"

namespace qht::types {

namespace {

constexpr long double kNegInfL = -std::numeric_limits<long double>::infinity();

}  // namespace

TypeVector type_of(const std::vector<int>& sequence, int alphabet_size) {
  if (sequence.empty()) throw Error(ErrorKind::EmptySequence, "cannot type an empty sequence");
  TypeVector t;
  t.counts.assign(static_cast<std::size_t>(alphabet_size), 0);
  t.n = static_cast<std::int64_t>(sequence.size());
  for (int s : sequence) {
    if (s < 0 || s >= alphabet_size) throw Error(ErrorKind::BadInput, "symbol outside alphabet");
    ++t.counts[static_cast<std::size_t>(s)];
  }
  return t;
}

std::int64_t count_types(std::int64_t n, int alphabet_size) {
  // C(n + k - 1, k - 1) with k - 1 <= 5; exact in __int128
  int b = alphabet_size - 1;
  __int128 r = 1;
  for (int i = 1; i <= b; ++i) {
    r *= (n + i);
    r /= i;
    if (r > static_cast<__int128>(4) * kTypeBudget) return 4 * kTypeBudget;  // saturate
  }
  return static_cast<std::int64_t>(r);
}

void check_type_budget(std::int64_t n, int alphabet_size) {
  if (n < 1) throw Error(ErrorKind::BadInput, "n must be positive");
  if (alphabet_size < 2 || alphabet_size > 6)
    throw Error(ErrorKind::TooManyTypes, "alphabet size capped at 6, got " + std::to_string(alphabet_size));
  std::int64_t c = count_types(n, alphabet_size);
  if (c > kTypeBudget)
    throw Error(ErrorKind::TooManyTypes,
                "type count " + std::to_string(c) + " exceeds budget " + std::to_string(kTypeBudget));
}

TypeVector first_type(std::int64_t n, int alphabet_size) {
  TypeVector t;
  t.counts.assign(static_cast<std::size_t>(alphabet_size), 0);
  t.counts.back() = n;
  t.n = n;
  return t;
}

bool next_type(TypeVector& t) {
  int k = t.alphabet_size();
  std::int64_t slack = t.counts[static_cast<std::size_t>(k - 1)];
  for (int j = k - 2; j >= 0; --j) {
    if (slack > 0) {
      ++t.counts[static_cast<std::size_t>(j)];
      for (int r = j + 1; r < k - 1; ++r) t.counts[static_cast<std::size_t>(r)] = 0;
      t.counts[static_cast<std::size_t>(k - 1)] = slack - 1;
      return true;
    }
    slack += t.counts[static_cast<std::size_t>(j)];
  }
  return false;
}

TypeVector unrank_type(std::int64_t n, int alphabet_size, std::int64_t index) {
  TypeVector t;
  t.n = n;
  t.counts.assign(static_cast<std::size_t>(alphabet_size), 0);
  std::int64_t rem = n;
  for (int pos = 0; pos < alphabet_size - 1; ++pos) {
    int parts_left = alphabet_size - pos - 1;
    for (std::int64_t c = 0; c <= rem; ++c) {
      std::int64_t block = count_types(rem - c, parts_left);
      if (index < block) {
        t.counts[static_cast<std::size_t>(pos)] = c;
        rem -= c;
        break;
      }
      index -= block;
    }
  }
  t.counts[static_cast<std::size_t>(alphabet_size - 1)] = rem;
  return t;
}

void enumerate_types(std::int64_t n, int alphabet_size,
                     const std::function<void(const TypeVector&)>& fn) {
  check_type_budget(n, alphabet_size);
  TypeVector t = first_type(n, alphabet_size);
  do {
    fn(t);
  } while (next_type(t));
}

namespace {

// extended precision keeps the exact-normalisation invariant well below 1e-12
long double log_prob_type_class_l(const TypeVector& t, const std::vector<long double>& logp) {
  long double v = lgammal(static_cast<long double>(t.n) + 1.0L);
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    std::int64_t c = t.counts[i];
    if (c == 0) continue;
    if (logp[i] == kNegInfL) return kNegInfL;
    v -= lgammal(static_cast<long double>(c) + 1.0L);
    v += static_cast<long double>(c) * logp[i];
  }
  return v;
}

std::vector<long double> log_probs_l(const ClassicalDistribution& p) {
  std::vector<long double> out(p.probs.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = p.probs[i] > 0.0 ? std::log(static_cast<long double>(p.probs[i])) : kNegInfL;
  return out;
}

}  // namespace

double log_prob_type_class(const TypeVector& t, const ClassicalDistribution& p) {
  if (t.alphabet_size() != p.alphabet_size())
    throw Error(ErrorKind::BadInput, "type/distribution alphabet mismatch");
  return static_cast<double>(log_prob_type_class_l(t, log_probs_l(p)));
}

double type_kl(const TypeVector& t, const ClassicalDistribution& q) {
  long double v = 0.0L;
  long double n = static_cast<long double>(t.n);
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    std::int64_t c = t.counts[i];
    if (c == 0) continue;
    if (q.probs[i] <= 0.0) return kPosInf;
    long double f = static_cast<long double>(c) / n;
    v += f * (std::log(f) - std::log(static_cast<long double>(q.probs[i])));
  }
  return static_cast<double>(v);
}

double type_sup_distance(const TypeVector& t, const ClassicalDistribution& p) {
  long double n = static_cast<long double>(t.n);
  long double m = 0.0L;
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    long double f = static_cast<long double>(t.counts[i]) / n;
    m = std::max(m, std::fabs(f - static_cast<long double>(p.probs[i])));
  }
  return static_cast<double>(m);
}

namespace {

struct LogAcc {
  std::array<long double, 6> v{kNegInfL, kNegInfL, kNegInfL, kNegInfL, kNegInfL, kNegInfL};
};

LogAcc combine_acc(const LogAcc& a, const LogAcc& b) {
  LogAcc r;
  for (int i = 0; i < 6; ++i) r.v[static_cast<std::size_t>(i)] =
      log_add(a.v[static_cast<std::size_t>(i)], b.v[static_cast<std::size_t>(i)]);
  return r;
}

OutcomeMasses finish(const LogAcc& a) {
  OutcomeMasses m{};
  for (int i = 0; i < 6; ++i) m.v[static_cast<std::size_t>(i)] =
      static_cast<double>(a.v[static_cast<std::size_t>(i)]);
  return m;
}

OutcomeMasses accumulate_impl(std::int64_t n, const ClassicalDistribution& p,
                              const ClassicalDistribution& q, const Classifier& classify,
                              bool parallel) {
  check_type_budget(n, p.alphabet_size());
  if (p.alphabet_size() != q.alphabet_size())
    throw Error(ErrorKind::BadInput, "alphabet mismatch");
  std::int64_t total = count_types(n, p.alphabet_size());
  std::vector<long double> lp = log_probs_l(p), lq = log_probs_l(q);
  int k = p.alphabet_size();

  auto map_chunk = [&](std::int64_t lo, std::int64_t hi) {
    LogAcc acc;
    TypeVector t = unrank_type(n, k, lo);
    for (std::int64_t i = lo; i < hi; ++i) {
      int o = static_cast<int>(classify(t));
      long double mass_p = log_prob_type_class_l(t, lp);
      long double mass_q = log_prob_type_class_l(t, lq);
      acc.v[static_cast<std::size_t>(o)] = log_add(acc.v[static_cast<std::size_t>(o)], mass_p);
      acc.v[static_cast<std::size_t>(o + 3)] = log_add(acc.v[static_cast<std::size_t>(o + 3)], mass_q);
      if (i + 1 < hi) next_type(t);
    }
    return acc;
  };
  LogAcc total_acc =
      par::chunked_reduce<LogAcc>(total, 4096, LogAcc{}, map_chunk, combine_acc, parallel);
  return finish(total_acc);
}

TestStatistics stats_from_masses(const OutcomeMasses& m, std::int64_t n, bool exact) {
  TestStatistics s;
  s.n = n;
  s.exact = exact;
  s.log_pi_P = log_add(m.m_p(), m.n_p());
  s.log_pi_Q = log_add(m.m_q(), m.n_q());
  s.log_alpha_bar = m.n_p() - s.log_pi_P;
  s.log_beta_bar = m.m_q() - s.log_pi_Q;
  s.log_incon_P = m.o_p();
  s.log_incon_Q = m.o_q();
  s.m_empty = m.m_p() == kNegInf && m.m_q() == kNegInf;
  s.n_empty = m.n_p() == kNegInf && m.n_q() == kNegInf;
  return s;
}

Classifier stein_classifier(const ClassicalDistribution& p, const ClassicalDistribution& q,
                            double delta) {
  return [p, q, delta](const TypeVector& t) {
    if (type_sup_distance(t, p) <= delta) return Outcome::AcceptRho;
    if (type_sup_distance(t, q) <= delta) return Outcome::AcceptSigma;
    return Outcome::Inconclusive;
  };
}

double sup_distance(const ClassicalDistribution& p, const ClassicalDistribution& q) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i)
    m = std::max(m, std::abs(p.probs[i] - q.probs[i]));
  return m;
}

void check_stein_pre(const ClassicalDistribution& p, const ClassicalDistribution& q, double delta) {
  p.validate(false);
  q.validate(false);
  if (!(delta > 0.0)) throw Error(ErrorKind::BadInput, "delta must be positive");
  if (delta >= 0.5 * sup_distance(p, q))
    throw Error(ErrorKind::OverlappingSets,
                "delta must stay below half the sup-distance between P and Q");
}

// radius of the accept-rho set; +inf K degenerates to an empty accept set
double reject_radius(const ClassicalDistribution& p, const ClassicalDistribution& q, double big_k) {
  if (std::isinf(big_k)) return kPosInf;
  RenyiKernels kqp(q, p);
  return hoeffding_div(kqp, Family::Petz, big_k);
}

Classifier reject_classifier(const ClassicalDistribution& q, double radius, double big_l) {
  return [q, radius, big_l](const TypeVector& t) {
    double d = type_kl(t, q);
    if (d > radius) return Outcome::AcceptRho;
    if (d <= big_l) return Outcome::AcceptSigma;
    return Outcome::Inconclusive;
  };
}

void check_reject_pre(const ClassicalDistribution& p, const ClassicalDistribution& q,
                      double radius, double big_l) {
  p.validate();
  q.validate();
  if (big_l < 0.0) throw Error(ErrorKind::InvalidThresholds, "L must be nonnegative");
  if (radius < big_l)
    throw Error(ErrorKind::InvalidThresholds,
                "accept sets overlap: H_K(Q||P) < L makes the test ill-formed");
}

}  // namespace

OutcomeMasses accumulate_outcomes(std::int64_t n, const ClassicalDistribution& p,
                                  const ClassicalDistribution& q, const Classifier& classify) {
  return accumulate_impl(n, p, q, classify, true);
}

OutcomeMasses accumulate_outcomes_serial(std::int64_t n, const ClassicalDistribution& p,
                                         const ClassicalDistribution& q, const Classifier& classify) {
  // plain reference loop, kept for testing the kernel
  check_type_budget(n, p.alphabet_size());
  std::vector<long double> lp = log_probs_l(p), lq = log_probs_l(q);
  LogAcc acc;
  TypeVector t = first_type(n, p.alphabet_size());
  do {
    int o = static_cast<int>(classify(t));
    acc.v[static_cast<std::size_t>(o)] =
        log_add(acc.v[static_cast<std::size_t>(o)], log_prob_type_class_l(t, lp));
    acc.v[static_cast<std::size_t>(o + 3)] =
        log_add(acc.v[static_cast<std::size_t>(o + 3)], log_prob_type_class_l(t, lq));
  } while (next_type(t));
  return finish(acc);
}

TestStatistics eval_stein_test(const ClassicalDistribution& p, const ClassicalDistribution& q,
                               std::int64_t n, double delta) {
  check_stein_pre(p, q, delta);
  return stats_from_masses(accumulate_outcomes(n, p, q, stein_classifier(p, q, delta)), n, true);
}

TestStatistics eval_stein_test_serial(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                      std::int64_t n, double delta) {
  check_stein_pre(p, q, delta);
  return stats_from_masses(accumulate_outcomes_serial(n, p, q, stein_classifier(p, q, delta)), n,
                           true);
}

TestStatistics eval_reject_test(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                std::int64_t n, double big_k, double big_l) {
  double radius = reject_radius(p, q, big_k);
  check_reject_pre(p, q, radius, big_l);
  return stats_from_masses(accumulate_outcomes(n, p, q, reject_classifier(q, radius, big_l)), n,
                           true);
}

TestStatistics eval_reject_test_serial(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                       std::int64_t n, double big_k, double big_l) {
  double radius = reject_radius(p, q, big_k);
  check_reject_pre(p, q, radius, big_l);
  return stats_from_masses(
      accumulate_outcomes_serial(n, p, q, reject_classifier(q, radius, big_l)), n, true);
}

double sanov_log_prob(const ClassicalDistribution& center, double radius,
                      const ClassicalDistribution& under, std::int64_t n, bool complement) {
  center.validate(false);
  under.validate(false);
  Classifier cl = [center, radius, complement](const TypeVector& t) {
    bool in_set = type_kl(t, center) <= radius;
    if (complement) in_set = !in_set;
    return in_set ? Outcome::AcceptRho : Outcome::Inconclusive;
  };
  OutcomeMasses m = accumulate_outcomes(n, under, under, cl);
  return m.m_p();
}

// ---------------- Monte Carlo fallback ----------------------------------

std::int64_t sample_binomial(const CounterRng& rng, std::uint64_t trial, std::uint64_t draw,
                             std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  bool flipped = p > 0.5;
  if (flipped) p = 1.0 - p;
  double np = static_cast<double>(n) * p;
  std::uint64_t lane_base = draw << 8;

  if (np < 10.0 || n < 30) {
    // CDF inversion
    double u = rng.uniform(trial, lane_base, 0);
    double q = 1.0 - p;
    double pk = std::pow(q, static_cast<double>(n));  // P(X = 0)
    double cdf = pk;
    std::int64_t k = 0;
    while (u > cdf && k < n) {
      pk *= (static_cast<double>(n - k) / static_cast<double>(k + 1)) * (p / q);
      ++k;
      cdf += pk;
    }
    return flipped ? n - k : k;
  }

  // BTRS rejection sampler (Hormann), exact for large np
  double q = 1.0 - p;
  double spq = std::sqrt(np * q);
  double b = 1.15 + 2.53 * spq;
  double a = -0.0873 + 0.0248 * b + 0.01 * p;
  double c = np + 0.5;
  double v_r = 0.92 - 4.2 / b;
  double alpha = (2.83 + 5.1 / b) * spq;
  double lpq = std::log(p / q);
  std::int64_t m = static_cast<std::int64_t>(std::floor((n + 1) * p));
  double h = std::lgamma(m + 1.0) + std::lgamma(n - m + 1.0);

  for (std::uint64_t attempt = 0;; ++attempt) {
    double u = rng.uniform(trial, lane_base + 1 + attempt, 0) - 0.5;
    double v = rng.uniform(trial, lane_base + 1 + attempt, 1);
    double us = 0.5 - std::abs(u);
    double kf = std::floor((2.0 * a / us + b) * u + c);
    if (kf < 0.0 || kf > static_cast<double>(n)) continue;
    std::int64_t k = static_cast<std::int64_t>(kf);
    if (us >= 0.07 && v <= v_r) return flipped ? n - k : k;
    v = std::log(v * alpha / (a / (us * us) + b));
    double crit = h - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                  (k - m) * lpq;
    if (v <= crit) return flipped ? n - k : k;
  }
}

TypeVector sample_type(const CounterRng& rng, std::uint64_t trial, const ClassicalDistribution& p,
                       std::int64_t n) {
  int k = p.alphabet_size();
  TypeVector t;
  t.n = n;
  t.counts.assign(static_cast<std::size_t>(k), 0);
  std::int64_t rem = n;
  double mass = 1.0;
  for (int i = 0; i < k - 1 && rem > 0; ++i) {
    double cond = mass > 0.0 ? std::min(1.0, p.probs[static_cast<std::size_t>(i)] / mass) : 0.0;
    std::int64_t c = sample_binomial(rng, trial, static_cast<std::uint64_t>(i), rem, cond);
    t.counts[static_cast<std::size_t>(i)] = c;
    rem -= c;
    mass -= p.probs[static_cast<std::size_t>(i)];
  }
  t.counts[static_cast<std::size_t>(k - 1)] = rem;
  return t;
}

namespace {

TestStatistics monte_carlo_impl(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                std::int64_t n, const Classifier& classify, std::int64_t trials,
                                std::uint64_t seed) {
  if (trials < 1000) throw Error(ErrorKind::BadInput, "need at least 1e3 trials");
  CounterRng rng(seed);
  struct Counts {
    std::array<std::int64_t, 6> c{0, 0, 0, 0, 0, 0};
  };
  auto map_chunk = [&](std::int64_t lo, std::int64_t hi) {
    Counts acc;
    for (std::int64_t t = lo; t < hi; ++t) {
      TypeVector tp = sample_type(rng, static_cast<std::uint64_t>(2 * t), p, n);
      TypeVector tq = sample_type(rng, static_cast<std::uint64_t>(2 * t + 1), q, n);
      ++acc.c[static_cast<std::size_t>(static_cast<int>(classify(tp)))];
      ++acc.c[static_cast<std::size_t>(3 + static_cast<int>(classify(tq)))];
    }
    return acc;
  };
  auto comb = [](Counts a, const Counts& b) {
    for (int i = 0; i < 6; ++i) a.c[static_cast<std::size_t>(i)] += b.c[static_cast<std::size_t>(i)];
    return a;
  };
  Counts total = par::chunked_reduce<Counts>(trials, 1024, Counts{}, map_chunk, comb, true);

  auto lg = [&](std::int64_t c) {
    return c > 0 ? std::log(static_cast<double>(c)) - std::log(static_cast<double>(trials)) : kNegInf;
  };
  OutcomeMasses m{};
  for (int i = 0; i < 6; ++i) m.v[static_cast<std::size_t>(i)] = lg(total.c[static_cast<std::size_t>(i)]);
  return stats_from_masses(m, n, false);
}

}  // namespace

TestStatistics monte_carlo_stein(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                 std::int64_t n, double delta, std::int64_t trials,
                                 std::uint64_t seed) {
  check_stein_pre(p, q, delta);
  return monte_carlo_impl(p, q, n, stein_classifier(p, q, delta), trials, seed);
}

TestStatistics monte_carlo_reject(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                  std::int64_t n, double big_k, double big_l, std::int64_t trials,
                                  std::uint64_t seed) {
  double radius = reject_radius(p, q, big_k);
  check_reject_pre(p, q, radius, big_l);
  return monte_carlo_impl(p, q, n, reject_classifier(q, radius, big_l), trials, seed);
}

}  // namespace qht::types
