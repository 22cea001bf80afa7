#include <doctest.h>

#include <cmath>

#include "qht/parallel.hpp"
#include "qht/scalars.hpp"
#include "qht/sequential.hpp"

using namespace qht;
using namespace qht::seq;

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

}  // namespace

TEST_CASE("optimal measurements: commuting pair") {
  MeasurementPair pair = optimal_measurements(bern(0.9), bern(0.2));
  CHECK(nats_to_bits(pair.achieved_fwd) == doctest::Approx(1.652933).epsilon(1e-6));
  CHECK(nats_to_bits(pair.achieved_rev) == doctest::Approx(1.966015).epsilon(1e-6));
  CHECK(pair.same_measurement);
  CHECK(pair.optimizer_converged);

  // POVM invariants: positive effects, completeness
  for (const auto& effects : {pair.effects_rho, pair.effects_sigma}) {
    Matrix sum(2);
    for (const Matrix& e : effects) {
      HermitianSpectrum es = eig(e, 1e-8);
      CHECK(es.eigenvalues.back() >= -1e-10);
      sum += e;
    }
    CHECK((sum - Matrix::identity(2)).max_abs_entry() <= 1e-9);
  }
  CHECK(pair.l_bound == doctest::Approx(std::log(8.0)).epsilon(1e-9));
}

TEST_CASE("optimal measurements: non-commuting pair") {
  DensityMatrix rho = fixed_rho(), sigma = fixed_sigma();
  MeasurementPair pair = optimal_measurements(rho, sigma);
  CHECK_FALSE(pair.same_measurement);
  CHECK(pair.achieved_fwd <= relative_entropy(rho, sigma) + 1e-9);
  CHECK(pair.achieved_rev <= relative_entropy(sigma, rho) + 1e-9);
  // no worse than measuring in the eigenbasis of sigma
  double pinched_value = measurement_kl(sigma.spectrum().eigenvectors, rho, sigma);
  CHECK(pair.achieved_fwd >= pinched_value - 1e-9);
  // drift expectations have the right signs
  CHECK(pair.expected_z[0][0] > 0.0);
  CHECK(pair.expected_z[1][1] < 0.0);
}

TEST_CASE("config validation") {
  MeasurementPair pair = optimal_measurements(bern(0.9), bern(0.2));
  CHECK_NOTHROW(make_config(pair, 400, bits_to_nats(0.3), 1, 1000));
  // epsilon at or above the measured relative entropy kills a threshold
  CHECK_THROWS_AS(make_config(pair, 400, pair.achieved_fwd, 1, 1000), Error);
  CHECK_THROWS_AS(make_config(pair, 400, pair.achieved_fwd + 0.1, 1, 1000), Error);

  // identical states cannot be configured at all
  MeasurementPair same = optimal_measurements(bern(0.5), bern(0.5));
  CHECK(std::abs(same.achieved_fwd) < 1e-12);
  CHECK_THROWS_AS(make_config(same, 400, bits_to_nats(0.3), 1, 1000), Error);
}

TEST_CASE("run_trial: determinism and decision consistency") {
  MeasurementPair pair = optimal_measurements(bern(0.9), bern(0.2));
  ProtocolConfig cfg = make_config(pair, 400, bits_to_nats(0.3), 0x5EED, 1000);
  for (std::int64_t t = 0; t < 1000; ++t) {
    TrialOutcome o = run_trial(TrueState::Rho, pair, cfg, t);
    Decision expect = o.final_s >= cfg.b_n
                          ? Decision::GuessRho
                          : (o.final_s <= -cfg.a_n ? Decision::GuessSigma : Decision::Inconclusive);
    CHECK(o.decision == expect);
    CHECK(o.switches == 0);  // commuting pair: one physical measurement
  }
  TrialOutcome a = run_trial(TrueState::Sigma, pair, cfg, 42);
  TrialOutcome b = run_trial(TrueState::Sigma, pair, cfg, 42);
  CHECK(a.final_s == b.final_s);
  CHECK(a.decision == b.decision);
  CHECK(a.negative_steps == b.negative_steps);

  TrialOutcome c = run_trial(TrueState::Rho, pair, cfg, 7, true);
  CHECK(c.trajectory.size() == 400);
  CHECK(c.trajectory.back() == doctest::Approx(c.final_s));
}

TEST_CASE("estimate_statistics: reproducible across worker counts") {
  MeasurementPair pair = optimal_measurements(fixed_rho(), fixed_sigma());
  ProtocolConfig cfg = make_config(pair, 200, bits_to_nats(0.2), 0xABCD, 4000);

  par::set_threads(1);
  SequentialReport one = estimate_statistics(pair, cfg);
  par::set_threads(par::max_threads());
  SequentialReport many = estimate_statistics(pair, cfg);
  CHECK(one.under_rho.errors == many.under_rho.errors);
  CHECK(one.under_rho.inconclusive == many.under_rho.inconclusive);
  CHECK(one.under_rho.sum_final_s == many.under_rho.sum_final_s);  // bitwise
  CHECK(one.under_sigma.sum_max_abs_m == many.under_sigma.sum_max_abs_m);

  // plain serial loop as the independent reference
  HypothesisBatch ref;
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    TrialOutcome o = run_trial(TrueState::Rho, pair, cfg, t);
    if (o.decision == Decision::Inconclusive)
      ++ref.inconclusive;
    else if (o.decision == Decision::GuessSigma)
      ++ref.errors;
    else
      ++ref.correct;
  }
  CHECK(ref.errors == many.under_rho.errors);
  CHECK(ref.inconclusive == many.under_rho.inconclusive);
  CHECK(ref.correct == many.under_rho.correct);
}

TEST_CASE("protocol statistics: bounds, drift, switching") {
  MeasurementPair pair = optimal_measurements(bern(0.9), bern(0.2));

  // permissive thresholds so errors can actually occur; the analytic bound must still hold
  ProtocolConfig loose = make_config(pair, 50, pair.achieved_fwd - 0.05, 0x5EED, 20000);
  SequentialReport lr = estimate_statistics(pair, loose);
  CHECK(static_cast<double>(lr.under_rho.errors) <=
        lr.expected_type1_bound + 3.0 * std::sqrt(lr.expected_type1_bound) + 1e-12);
  CHECK(static_cast<double>(lr.under_sigma.errors) <=
        lr.expected_type2_bound + 3.0 * std::sqrt(lr.expected_type2_bound) + 1e-12);

  ProtocolConfig cfg = make_config(pair, 400, bits_to_nats(0.3), 0x5EED, 20000);
  SequentialReport r = estimate_statistics(pair, cfg);
  double trials = static_cast<double>(cfg.trials);

  CHECK(std::abs(nats_to_bits(r.mean_s_rho - pair.achieved_fwd)) <= 0.05);
  CHECK(std::abs(nats_to_bits(r.mean_s_sigma + pair.achieved_rev)) <= 0.05);
  CHECK(r.drift_rho.negative_time_fraction <= 0.05);
  CHECK(r.drift_sigma.negative_time_fraction >= 0.95);  // mirrored under sigma
  CHECK(r.no_switch_fraction_rho >= 0.95);
  CHECK(static_cast<double>(r.under_rho.inconclusive) / trials <= 0.02);

  // Azuma-consistency at delta = 0.2 L
  double slack = 3.0 * std::sqrt(r.azuma_bound / trials);
  CHECK(r.azuma_fraction_rho <= r.azuma_bound + slack);
  CHECK(r.azuma_fraction_sigma <= r.azuma_bound + slack);

  // martingale scale shrinks like n^(-1/2): quadrupling n halves it (+-30%)
  ProtocolConfig cfg4 = make_config(pair, 1600, bits_to_nats(0.3), 0x5EED, 20000);
  SequentialReport r4 = estimate_statistics(pair, cfg4);
  double ratio = r4.drift_rho.martingale_part_scale / r.drift_rho.martingale_part_scale;
  CHECK(ratio >= 0.35);
  CHECK(ratio <= 0.65);
}

TEST_CASE("single-sequence measured rates climb toward the relative entropies") {
  // brute-force block diagnostic at k <= 3: the per-copy measured relative
  // entropy of k-copy blocks approaches D in both directions, which is what
  // lets the blocked protocol reach the optimal exponents
  DensityMatrix rho = fixed_rho(), sigma = fixed_sigma();
  double d_fwd = relative_entropy(rho, sigma);
  double d_rev = relative_entropy(sigma, rho);
  Matrix rk = rho.mat(), sk = sigma.mat();
  double prev_f = kNegInf, prev_r = kNegInf;
  for (int k = 1; k <= 3; ++k) {
    if (k > 1) {
      rk = kron(rk, rho.mat());
      sk = kron(sk, sigma.mat());
    }
    DensityMatrix rhok = validate_state(rk), sigk = validate_state(sk);
    double f = measured_relative_entropy(rhok, sigk).value / k;
    double r = measured_relative_entropy(sigk, rhok).value / k;
    CHECK(f <= d_fwd + 1e-9);
    CHECK(r <= d_rev + 1e-9);
    CHECK(f >= prev_f - 1e-6);  // product measurements make blocks no worse
    CHECK(r >= prev_r - 1e-6);
    prev_f = f;
    prev_r = r;
  }
  CHECK(prev_f > measured_relative_entropy(rho, sigma).value);  // strict gain by k=3
}

TEST_CASE("drift_diagnostic over recorded trajectories") {
  MeasurementPair pair = optimal_measurements(fixed_rho(), fixed_sigma());
  ProtocolConfig cfg = make_config(pair, 400, bits_to_nats(0.2), 0x11, 100);
  std::vector<TrialOutcome> outs;
  for (std::int64_t t = 0; t < 100; ++t) outs.push_back(run_trial(TrueState::Rho, pair, cfg, t, true));
  DriftDiagnostic d = drift_diagnostic(outs, cfg.n);
  CHECK(d.negative_time_fraction <= 0.05);
  CHECK(d.martingale_part_scale > 0.0);
  CHECK(d.martingale_part_scale < 0.5);
}
