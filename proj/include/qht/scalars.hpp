#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace qht {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.69314718055994530941723212145818;

inline double nats_to_bits(double x) { return x / kLn2; }
inline double bits_to_nats(double x) { return x * kLn2; }

// log(exp(a) + exp(b)); tolerates -inf arguments.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

inline long double log_add(long double a, long double b) {
  if (a == -std::numeric_limits<long double>::infinity()) return b;
  if (b == -std::numeric_limits<long double>::infinity()) return a;
  long double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// log(exp(a) - exp(b)) for a >= b.
inline double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  if (b >= a) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

// Golden-section maximisation of a unimodal-enough f on [lo, hi].
// Returns the argmax; |bracket| is shrunk below xtol.
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double xtol = 1e-10, int max_iter = 200) {
  const double inv_phi = 0.61803398874989484820;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// sup of f over the open interval (0,1): dense grid, golden refinement around
// the best grid cell, optional closed-form endpoint values for x->0, x->1.
inline double sup_unit_interval(const std::function<double(double)>& f,
                                int grid = 512,
                                std::optional<double> left_limit = std::nullopt,
                                std::optional<double> right_limit = std::nullopt,
                                double xtol = 1e-10,
                                double edge_guard = 1e-12) {
  double best = kNegInf;
  int best_i = -1;
  for (int i = 1; i < grid; ++i) {
    double x = static_cast<double>(i) / grid;
    double v = f(x);
    if (v > best) { best = v; best_i = i; }
  }
  if (best_i >= 0) {
    double lo = std::max(0.0, (best_i - 1.0) / grid);
    double hi = std::min(1.0, (best_i + 1.0) / grid);
    // keep strictly interior; endpoint limits are handled separately.  The
    // guard matters where f is a 0/0 ratio at an endpoint: evaluating there
    // amplifies roundoff, while the true limit arrives via the closed form.
    lo = std::max(lo, edge_guard);
    hi = std::min(hi, 1.0 - edge_guard);
    double x = golden_max(f, lo, hi, xtol);
    best = std::max(best, f(x));
  }
  if (left_limit) best = std::max(best, *left_limit);
  if (right_limit) best = std::max(best, *right_limit);
  return best;
}

inline double inf_unit_interval(const std::function<double(double)>& f,
                                int grid = 512,
                                std::optional<double> left_limit = std::nullopt,
                                std::optional<double> right_limit = std::nullopt,
                                double xtol = 1e-10,
                                double edge_guard = 1e-12) {
  auto neg = [&](double x) { return -f(x); };
  std::optional<double> l = left_limit ? std::optional<double>(-*left_limit) : std::nullopt;
  std::optional<double> r = right_limit ? std::optional<double>(-*right_limit) : std::nullopt;
  return -sup_unit_interval(neg, grid, l, r, xtol, edge_guard);
}

// Wilson 95% score interval for x successes out of n.
struct Interval {
  double lo = 0.0, hi = 1.0;
};

inline Interval wilson95(std::int64_t x, std::int64_t n) {
  if (n <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  double p = static_cast<double>(x) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Richardson extrapolation of g(eps) -> g(0) from values at eps, eps/2, eps/4,
// assuming an expansion g(eps) = g0 + c1 eps + c2 eps^2 + ...
struct RichardsonResult {
  double value;       // second-order extrapolant
  double disagreement;  // |difference of the two first-order extrapolants|
};

inline RichardsonResult richardson3(double g1, double g2, double g4) {
  double f12 = 2.0 * g2 - g1;
  double f24 = 2.0 * g4 - g2;
  return {(4.0 * f24 - f12) / 3.0, std::abs(f24 - f12)};
}

}  // namespace qht
