#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "qht/linalg.hpp"
#include "qht/rng.hpp"

namespace qht::types {

struct TypeVector {
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;

  int alphabet_size() const { return static_cast<int>(counts.size()); }
};

// Exact or empirical test statistics in the natural-log domain.
struct TestStatistics {
  double log_alpha_bar = 0.0;
  double log_beta_bar = 0.0;
  double log_pi_P = 0.0;
  double log_pi_Q = 0.0;
  double log_incon_P = 0.0;  // log(1 - pi_P), summed directly, not via complement
  double log_incon_Q = 0.0;
  std::int64_t n = 0;
  bool exact = true;
  bool m_empty = false;  // accept-rho set carries no type: beta_bar undefined (-inf)
  bool n_empty = false;
};

TypeVector type_of(const std::vector<int>& sequence, int alphabet_size);

// Number of types = C(n+k-1, k-1); exact as long as it fits the budget scale.
std::int64_t count_types(std::int64_t n, int alphabet_size);

// Budget gate used by every enumeration: alphabet <= 6 and count <= 1e8.
inline constexpr std::int64_t kTypeBudget = 100000000;
void check_type_budget(std::int64_t n, int alphabet_size);

// Lexicographically ascending enumeration (counts compared left to right).
TypeVector first_type(std::int64_t n, int alphabet_size);
bool next_type(TypeVector& t);
TypeVector unrank_type(std::int64_t n, int alphabet_size, std::int64_t index);
void enumerate_types(std::int64_t n, int alphabet_size,
                     const std::function<void(const TypeVector&)>& fn);

// log of the probability that an i.i.d. sample from P lands in the type class
// of t: log multinomial(n; counts) + sum counts * log p.  -inf if t leaves
// the support of P.  Computed in extended precision internally.
double log_prob_type_class(const TypeVector& t, const ClassicalDistribution& p);

// empirical distribution divergences of a type
double type_kl(const TypeVector& t, const ClassicalDistribution& q);
double type_sup_distance(const TypeVector& t, const ClassicalDistribution& p);

// outcome labels for the three-outcome classifiers
enum class Outcome : std::uint8_t { AcceptRho = 0, AcceptSigma = 1, Inconclusive = 2 };
using Classifier = std::function<Outcome(const TypeVector&)>;

// Six log-masses: {M, N, other} x {P, Q}, accumulated over all types in
// lexicographic order.  The parallel kernel chunks the enumeration and folds
// chunk partials in a fixed tree, so results are identical across worker
// counts; the serial variant is the plain reference loop.
struct OutcomeMasses {
  std::array<double, 6> v;
  double m_p() const { return v[0]; }
  double n_p() const { return v[1]; }
  double o_p() const { return v[2]; }
  double m_q() const { return v[3]; }
  double n_q() const { return v[4]; }
  double o_q() const { return v[5]; }
};

OutcomeMasses accumulate_outcomes(std::int64_t n, const ClassicalDistribution& p,
                                  const ClassicalDistribution& q, const Classifier& classify);
OutcomeMasses accumulate_outcomes_serial(std::int64_t n, const ClassicalDistribution& p,
                                         const ClassicalDistribution& q, const Classifier& classify);

// Typicality test: accept rho when the type is delta-close to P in sup norm,
// accept sigma when delta-close to Q.
TestStatistics eval_stein_test(const ClassicalDistribution& p, const ClassicalDistribution& q,
                               std::int64_t n, double delta);
TestStatistics eval_stein_test_serial(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                      std::int64_t n, double delta);

// Reject test with conclusiveness exponents (K, L) in nats: accept rho when
// D(t||Q) exceeds the Hoeffding radius H_K(Q||P), accept sigma when
// D(t||Q) <= L.
TestStatistics eval_reject_test(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                std::int64_t n, double big_k, double big_l);
TestStatistics eval_reject_test_serial(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                       std::int64_t n, double big_k, double big_l);

// Exact log-probability under `under` of the Sanov set
// { x^n : D(t_{x^n} || center) <= radius } (or of its complement).
double sanov_log_prob(const ClassicalDistribution& center, double radius,
                      const ClassicalDistribution& under, std::int64_t n, bool complement);

// Monte Carlo fallback used beyond the exact type budget; exact=false.
TestStatistics monte_carlo_stein(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                 std::int64_t n, double delta, std::int64_t trials,
                                 std::uint64_t seed);
TestStatistics monte_carlo_reject(const ClassicalDistribution& p, const ClassicalDistribution& q,
                                  std::int64_t n, double big_k, double big_l, std::int64_t trials,
                                  std::uint64_t seed);

// counter-based exact binomial sampler (inversion below np=10, BTRS above)
std::int64_t sample_binomial(const CounterRng& rng, std::uint64_t trial, std::uint64_t draw,
                             std::int64_t n, double p);
TypeVector sample_type(const CounterRng& rng, std::uint64_t trial, const ClassicalDistribution& p,
                       std::int64_t n);

}  // namespace qht::types
