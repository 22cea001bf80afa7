#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qht/divergences.hpp"
#include "qht/linalg.hpp"
#include "qht/scalars.hpp"
#include "qht/types_engine.hpp"

namespace qht::seq {

// The two measurements the adaptive protocol switches between, with their
// outcome distributions under either hypothesis precomputed.
struct MeasurementPair {
  std::vector<Matrix> effects_rho;    // POVM maximising D(M(rho)||M(sigma))
  std::vector<Matrix> effects_sigma;  // POVM maximising D(M(sigma)||M(rho))
  // [measurement][state][outcome]; measurement 0 = M_rho, state 0 = rho
  std::array<std::array<std::vector<double>, 2>, 2> probs;
  std::array<std::array<std::vector<double>, 2>, 2> log_probs;
  double achieved_fwd = 0.0;  // D(M_rho(rho) || M_rho(sigma))
  double achieved_rev = 0.0;  // D(M_sigma(sigma) || M_sigma(rho))
  double l_bound = 0.0;       // max |Z| over measurements and outcomes
  // E[Z | measurement, true state]; positive under rho, negative under sigma
  std::array<std::array<double, 2>, 2> expected_z{};
  bool optimizer_converged = true;
  // the two POVMs coincide as effect sets (always true for commuting states),
  // so branch changes of the walk never change the applied measurement
  bool same_measurement = false;
};

MeasurementPair optimal_measurements(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     const MeasuredOptions& opts = {});

struct ProtocolConfig {
  std::int64_t n = 0;
  double epsilon = 0.0;  // nats
  double a_n = 0.0;      // n * (D_M(sigma||rho) - epsilon)
  double b_n = 0.0;      // n * (D_M(rho||sigma) - epsilon)
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  double l_bound = 0.0;
};

// Validates the threshold invariant a_n, b_n > 0.
ProtocolConfig make_config(const MeasurementPair& pair, std::int64_t n, double epsilon_nats,
                           std::uint64_t seed, std::int64_t trials);

enum class TrueState { Rho, Sigma };
enum class Decision { GuessRho, GuessSigma, Inconclusive };

struct TrialOutcome {
  Decision decision = Decision::Inconclusive;
  double final_s = 0.0;
  int switches = 0;                 // changes of the applied measurement
  int branch_changes = 0;           // sign changes of the walk selection rule
  double max_abs_martingale = 0.0;  // max_k |S_k - D_k| over the trajectory
  double final_martingale = 0.0;
  std::int64_t negative_steps = 0;  // steps taken with S_{k-1} < 0
  std::vector<double> trajectory;   // S_k, only when recording is requested
};

TrialOutcome run_trial(TrueState true_state, const MeasurementPair& pair,
                       const ProtocolConfig& cfg, std::int64_t trial_index,
                       bool record_trajectory = false);

struct DriftDiagnostic {
  double martingale_part_scale;    // mean over trials of (1/n) max_k |M_k|
  double negative_time_fraction;   // mean fraction of steps with S_{k-1} < 0
};

DriftDiagnostic drift_diagnostic(const std::vector<TrialOutcome>& outcomes, std::int64_t n);

// Per-hypothesis aggregate of a Monte Carlo batch.
struct HypothesisBatch {
  std::int64_t trials = 0;
  std::int64_t errors = 0;        // wrong guess
  std::int64_t correct = 0;
  std::int64_t inconclusive = 0;
  double sum_final_s = 0.0;
  double sum_max_abs_m = 0.0;
  double sum_neg_steps = 0.0;
  std::int64_t azuma_exceed = 0;  // |M_n| >= 0.2 * l_bound * n
  std::int64_t zero_switch = 0;
};

struct SequentialReport {
  types::TestStatistics stats;  // empirical, exact = false
  HypothesisBatch under_rho, under_sigma;
  Interval alpha_interval, beta_interval, pi_rho_interval, pi_sigma_interval;
  double mean_s_rho = 0.0, mean_s_sigma = 0.0;        // mean S_n / n
  DriftDiagnostic drift_rho{}, drift_sigma{};
  double azuma_fraction_rho = 0.0, azuma_fraction_sigma = 0.0;
  double azuma_bound = 0.0;  // 2 exp(-n delta^2 / (8 L^2)) at delta = 0.2 L
  // analytic ceilings on error counts: trials * exp(-A_n), trials * exp(-B_n)
  double expected_type1_bound = 0.0, expected_type2_bound = 0.0;
  double no_switch_fraction_rho = 0.0;
};

SequentialReport estimate_statistics(const MeasurementPair& pair, const ProtocolConfig& cfg,
                                     bool parallel = true);

}  // namespace qht::seq
