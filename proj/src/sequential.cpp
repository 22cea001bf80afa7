#include "qht/sequential.hpp"

#include <algorithm>
#include <cmath>

#include "qht/parallel.hpp"
#include "qht/rng.hpp"

namespace qht::seq {

namespace {

std::vector<Matrix> rank_one_effects(const Matrix& basis) {
  int n = basis.dim();
  std::vector<Matrix> effects;
  effects.reserve(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    Matrix e(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e(i, j) = basis(i, x) * std::conj(basis(j, x));
    effects.push_back(e);
  }
  return effects;
}

std::vector<double> effect_probs(const std::vector<Matrix>& effects, const Matrix& state) {
  std::vector<double> out;
  out.reserve(effects.size());
  for (const Matrix& e : effects) {
    cplx t = 0.0;
    for (int i = 0; i < e.dim(); ++i)
      for (int j = 0; j < e.dim(); ++j) t += e(i, j) * state(j, i);
    out.push_back(std::max(t.real(), 0.0));
  }
  return out;
}

}  // namespace

MeasurementPair optimal_measurements(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     const MeasuredOptions& opts) {
  if (rho.dim() > 8) throw Error(ErrorKind::DimensionBudget, "protocol supports d <= 8");
  MeasuredResult fwd = measured_relative_entropy(rho, sigma, opts);
  MeasuredResult rev = measured_relative_entropy(sigma, rho, opts);

  MeasurementPair pair;
  pair.effects_rho = rank_one_effects(fwd.basis);
  pair.effects_sigma = rank_one_effects(rev.basis);
  pair.achieved_fwd = fwd.value;
  pair.achieved_rev = rev.value;
  pair.optimizer_converged = fwd.converged && rev.converged;

  for (int m = 0; m < 2; ++m) {
    const std::vector<Matrix>& eff = m == 0 ? pair.effects_rho : pair.effects_sigma;
    pair.probs[static_cast<std::size_t>(m)][0] = effect_probs(eff, rho.mat());
    pair.probs[static_cast<std::size_t>(m)][1] = effect_probs(eff, sigma.mat());
    for (int s = 0; s < 2; ++s) {
      std::vector<double>& pr = pair.probs[static_cast<std::size_t>(m)][static_cast<std::size_t>(s)];
      std::vector<double> lg(pr.size());
      for (std::size_t i = 0; i < pr.size(); ++i) {
        if (pr[i] <= 0.0)
          throw Error(ErrorKind::RankDeficient,
                      "outcome probabilities must be strictly positive for full-rank states");
        lg[i] = std::log(pr[i]);
      }
      pair.log_probs[static_cast<std::size_t>(m)][static_cast<std::size_t>(s)] = lg;
    }
  }

  // compare the two POVMs as unordered effect sets
  pair.same_measurement = true;
  if (pair.effects_rho.size() != pair.effects_sigma.size()) pair.same_measurement = false;
  std::vector<bool> used(pair.effects_sigma.size(), false);
  for (const Matrix& e : pair.effects_rho) {
    if (!pair.same_measurement) break;
    bool found = false;
    for (std::size_t j = 0; j < pair.effects_sigma.size(); ++j) {
      if (used[j]) continue;
      if ((e - pair.effects_sigma[j]).max_abs_entry() <= 1e-9) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) pair.same_measurement = false;
  }

  pair.l_bound = 0.0;
  for (int m = 0; m < 2; ++m) {
    std::size_t outcomes = pair.probs[static_cast<std::size_t>(m)][0].size();
    for (std::size_t x = 0; x < outcomes; ++x) {
      double z = pair.log_probs[static_cast<std::size_t>(m)][0][x] -
                 pair.log_probs[static_cast<std::size_t>(m)][1][x];
      pair.l_bound = std::max(pair.l_bound, std::abs(z));
    }
    for (int s = 0; s < 2; ++s) {
      double ez = 0.0;
      for (std::size_t x = 0; x < outcomes; ++x) {
        double z = pair.log_probs[static_cast<std::size_t>(m)][0][x] -
                   pair.log_probs[static_cast<std::size_t>(m)][1][x];
        ez += pair.probs[static_cast<std::size_t>(m)][static_cast<std::size_t>(s)][x] * z;
      }
      pair.expected_z[static_cast<std::size_t>(m)][static_cast<std::size_t>(s)] = ez;
    }
  }
  return pair;
}

ProtocolConfig make_config(const MeasurementPair& pair, std::int64_t n, double epsilon_nats,
                           std::uint64_t seed, std::int64_t trials) {
  if (n < 1) throw Error(ErrorKind::BadInput, "n must be positive");
  if (trials < 1) throw Error(ErrorKind::BadInput, "trials must be positive");
  ProtocolConfig cfg;
  cfg.n = n;
  cfg.epsilon = epsilon_nats;
  cfg.a_n = static_cast<double>(n) * (pair.achieved_rev - epsilon_nats);
  cfg.b_n = static_cast<double>(n) * (pair.achieved_fwd - epsilon_nats);
  if (!(cfg.a_n > 0.0) || !(cfg.b_n > 0.0))
    throw Error(ErrorKind::InvalidThresholds,
                "thresholds must be positive: epsilon must stay below both measured relative entropies");
  cfg.seed = seed;
  cfg.trials = trials;
  cfg.l_bound = pair.l_bound;
  return cfg;
}

TrialOutcome run_trial(TrueState true_state, const MeasurementPair& pair,
                       const ProtocolConfig& cfg, std::int64_t trial_index,
                       bool record_trajectory) {
  CounterRng rng(cfg.seed);
  int state = true_state == TrueState::Rho ? 0 : 1;

  TrialOutcome out;
  if (record_trajectory) out.trajectory.reserve(static_cast<std::size_t>(cfg.n));

  double s = 0.0;
  double drift = 0.0;
  int prev_meas = -1;
  for (std::int64_t k = 1; k <= cfg.n; ++k) {
    int meas = s >= 0.0 ? 0 : 1;  // M_rho while the walk is nonnegative
    if (s < 0.0) ++out.negative_steps;
    if (prev_meas >= 0 && meas != prev_meas) {
      ++out.branch_changes;
      if (!pair.same_measurement) ++out.switches;
    }
    prev_meas = meas;

    const std::vector<double>& pr =
        pair.probs[static_cast<std::size_t>(meas)][static_cast<std::size_t>(state)];
    double u = rng.uniform(static_cast<std::uint64_t>(trial_index), static_cast<std::uint64_t>(k));
    std::size_t x = 0;
    double cdf = 0.0;
    for (; x + 1 < pr.size(); ++x) {
      cdf += pr[x];
      if (u < cdf) break;
    }
    double z = pair.log_probs[static_cast<std::size_t>(meas)][0][x] -
               pair.log_probs[static_cast<std::size_t>(meas)][1][x];
    s += z;
    drift += pair.expected_z[static_cast<std::size_t>(meas)][static_cast<std::size_t>(state)];
    out.max_abs_martingale = std::max(out.max_abs_martingale, std::abs(s - drift));
    if (record_trajectory) out.trajectory.push_back(s);
  }
  out.final_s = s;
  out.final_martingale = s - drift;
  if (s >= cfg.b_n)
    out.decision = Decision::GuessRho;
  else if (s <= -cfg.a_n)
    out.decision = Decision::GuessSigma;
  else
    out.decision = Decision::Inconclusive;
  return out;
}

DriftDiagnostic drift_diagnostic(const std::vector<TrialOutcome>& outcomes, std::int64_t n) {
  DriftDiagnostic d{0.0, 0.0};
  if (outcomes.empty() || n <= 0) return d;
  for (const TrialOutcome& o : outcomes) {
    d.martingale_part_scale += o.max_abs_martingale;
    d.negative_time_fraction += static_cast<double>(o.negative_steps);
  }
  double nn = static_cast<double>(n) * static_cast<double>(outcomes.size());
  d.martingale_part_scale /= nn;
  d.negative_time_fraction /= nn;
  return d;
}

namespace {

HypothesisBatch run_batch(TrueState true_state, const MeasurementPair& pair,
                          const ProtocolConfig& cfg, bool parallel) {
  double azuma_level = 0.2 * cfg.l_bound * static_cast<double>(cfg.n);
  auto map_chunk = [&](std::int64_t lo, std::int64_t hi) {
    HypothesisBatch b;
    for (std::int64_t t = lo; t < hi; ++t) {
      TrialOutcome o = run_trial(true_state, pair, cfg, t);
      ++b.trials;
      bool err_is = true_state == TrueState::Rho ? o.decision == Decision::GuessSigma
                                                 : o.decision == Decision::GuessRho;
      if (o.decision == Decision::Inconclusive)
        ++b.inconclusive;
      else if (err_is)
        ++b.errors;
      else
        ++b.correct;
      b.sum_final_s += o.final_s;
      b.sum_max_abs_m += o.max_abs_martingale;
      b.sum_neg_steps += static_cast<double>(o.negative_steps);
      if (std::abs(o.final_martingale) >= azuma_level) ++b.azuma_exceed;
      if (o.switches == 0) ++b.zero_switch;
    }
    return b;
  };
  auto comb = [](HypothesisBatch a, const HypothesisBatch& b) {
    a.trials += b.trials;
    a.errors += b.errors;
    a.correct += b.correct;
    a.inconclusive += b.inconclusive;
    a.sum_final_s += b.sum_final_s;
    a.sum_max_abs_m += b.sum_max_abs_m;
    a.sum_neg_steps += b.sum_neg_steps;
    a.azuma_exceed += b.azuma_exceed;
    a.zero_switch += b.zero_switch;
    return a;
  };
  return par::chunked_reduce<HypothesisBatch>(cfg.trials, 1024, HypothesisBatch{}, map_chunk, comb,
                                              parallel);
}

double log_ratio(std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0) return kNegInf;
  return std::log(static_cast<double>(num)) - std::log(static_cast<double>(den));
}

}  // namespace

SequentialReport estimate_statistics(const MeasurementPair& pair, const ProtocolConfig& cfg,
                                     bool parallel) {
  if (cfg.trials < 1000) throw Error(ErrorKind::BadInput, "need at least 1e3 trials");
  SequentialReport r;
  r.under_rho = run_batch(TrueState::Rho, pair, cfg, parallel);
  r.under_sigma = run_batch(TrueState::Sigma, pair, cfg, parallel);

  std::int64_t concl_rho = r.under_rho.errors + r.under_rho.correct;
  std::int64_t concl_sigma = r.under_sigma.errors + r.under_sigma.correct;

  r.stats.n = cfg.n;
  r.stats.exact = false;
  r.stats.log_alpha_bar = log_ratio(r.under_rho.errors, concl_rho);
  r.stats.log_beta_bar = log_ratio(r.under_sigma.errors, concl_sigma);
  r.stats.log_pi_P = log_ratio(concl_rho, cfg.trials);
  r.stats.log_pi_Q = log_ratio(concl_sigma, cfg.trials);
  r.stats.log_incon_P = log_ratio(r.under_rho.inconclusive, cfg.trials);
  r.stats.log_incon_Q = log_ratio(r.under_sigma.inconclusive, cfg.trials);

  r.alpha_interval = wilson95(r.under_rho.errors, concl_rho);
  r.beta_interval = wilson95(r.under_sigma.errors, concl_sigma);
  r.pi_rho_interval = wilson95(concl_rho, cfg.trials);
  r.pi_sigma_interval = wilson95(concl_sigma, cfg.trials);

  double n = static_cast<double>(cfg.n);
  double trials = static_cast<double>(cfg.trials);
  r.mean_s_rho = r.under_rho.sum_final_s / (trials * n);
  r.mean_s_sigma = r.under_sigma.sum_final_s / (trials * n);
  r.drift_rho = {r.under_rho.sum_max_abs_m / (trials * n), r.under_rho.sum_neg_steps / (trials * n)};
  r.drift_sigma = {r.under_sigma.sum_max_abs_m / (trials * n),
                   r.under_sigma.sum_neg_steps / (trials * n)};
  r.azuma_fraction_rho = static_cast<double>(r.under_rho.azuma_exceed) / trials;
  r.azuma_fraction_sigma = static_cast<double>(r.under_sigma.azuma_exceed) / trials;
  double delta = 0.2 * cfg.l_bound;
  r.azuma_bound =
      cfg.l_bound > 0.0 ? 2.0 * std::exp(-n * delta * delta / (8.0 * cfg.l_bound * cfg.l_bound)) : 1.0;
  r.expected_type1_bound = trials * std::exp(-cfg.a_n);
  r.expected_type2_bound = trials * std::exp(-cfg.b_n);
  r.no_switch_fraction_rho = static_cast<double>(r.under_rho.zero_switch) / trials;
  return r;
}

}  // namespace qht::seq
