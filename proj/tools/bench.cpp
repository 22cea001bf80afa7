#include <chrono>
#include <cmath>
#include <cstdio>

#include "qht/parallel.hpp"
#include "qht/scalars.hpp"
#include "qht/sequential.hpp"
#include "qht/types_engine.hpp"

using namespace qht;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void bench_type_sums() {
  // 5-letter alphabet, ~9.7e6 types
  ClassicalDistribution p{{0.35, 0.25, 0.2, 0.12, 0.08}};
  ClassicalDistribution q{{0.08, 0.12, 0.2, 0.25, 0.35}};
  const std::int64_t n = 120;
  types::Classifier cls = [&](const types::TypeVector& t) {
    double d = types::type_kl(t, q);
    if (d > 0.6) return types::Outcome::AcceptRho;
    if (d <= 0.05) return types::Outcome::AcceptSigma;
    return types::Outcome::Inconclusive;
  };

  auto t0 = Clock::now();
  types::OutcomeMasses serial = types::accumulate_outcomes_serial(n, p, q, cls);
  double ts = seconds_since(t0);

  t0 = Clock::now();
  types::OutcomeMasses parallel = types::accumulate_outcomes(n, p, q, cls);
  double tp = seconds_since(t0);

  double max_diff = 0.0;
  for (int i = 0; i < 6; ++i)
    max_diff = std::max(max_diff, std::abs(serial.v[static_cast<std::size_t>(i)] -
                                           parallel.v[static_cast<std::size_t>(i)]));
  std::printf("%-28s %10.3f s %10.3f s %8.2fx   max |diff| = %.2e\n", "type mass sums (9.7e6)", ts,
              tp, ts / tp, max_diff);
}

void bench_sequential() {
  DensityMatrix rho = embed_diagonal(ClassicalDistribution::bernoulli(0.9));
  DensityMatrix sigma = embed_diagonal(ClassicalDistribution::bernoulli(0.2));
  seq::MeasurementPair pair = seq::optimal_measurements(rho, sigma);
  seq::ProtocolConfig cfg = seq::make_config(pair, 400, bits_to_nats(0.3), 0x5EED, 200000);

  auto t0 = Clock::now();
  seq::SequentialReport serial = seq::estimate_statistics(pair, cfg, false);
  double ts = seconds_since(t0);

  t0 = Clock::now();
  seq::SequentialReport parallel = seq::estimate_statistics(pair, cfg, true);
  double tp = seconds_since(t0);

  bool identical = serial.under_rho.errors == parallel.under_rho.errors &&
                   serial.under_rho.inconclusive == parallel.under_rho.inconclusive &&
                   serial.under_rho.sum_final_s == parallel.under_rho.sum_final_s &&
                   serial.under_sigma.sum_final_s == parallel.under_sigma.sum_final_s;
  std::printf("%-28s %10.3f s %10.3f s %8.2fx   %s\n", "protocol trials (2x2e5x400)", ts, tp,
              ts / tp, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", par::max_threads());
  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");
  bench_type_sums();
  bench_sequential();
  return 0;
}
