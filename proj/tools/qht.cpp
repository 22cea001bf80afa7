#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qht/divergences.hpp"
#include "qht/io.hpp"
#include "qht/manifest.hpp"
#include "qht/parallel.hpp"
#include "qht/pinching.hpp"
#include "qht/regions.hpp"
#include "qht/scalars.hpp"
#include "qht/sequential.hpp"
#include "qht/types_engine.hpp"
#include "qht/verify.hpp"

using nlohmann::json;
using namespace qht;

namespace {

struct CommonArgs {
  std::string base = "e";
  bool as_json = false;
  std::string out_path;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& c) {
  cmd->add_option("--base", c.base, "logarithm base for inputs/outputs: e (nats) or 2 (bits)")
      ->check(CLI::IsMember({"e", "2"}));
  cmd->add_flag("--json", c.as_json, "emit JSON instead of plain text");
  cmd->add_option("--out", c.out_path,
                  "write the result to this file (a .manifest.json is written alongside)");
  cmd->add_option("--threads", c.threads, "cap the number of worker threads");
}

double from_base(const CommonArgs& c, double v) { return c.base == "2" ? bits_to_nats(v) : v; }
double to_base(const CommonArgs& c, double v) { return c.base == "2" ? nats_to_bits(v) : v; }

struct StateArgs {
  std::string rho_path, sigma_path;
  double bern_p = -1.0, bern_q = -1.0;
};

void add_states(CLI::App* cmd, StateArgs& s) {
  cmd->add_option("--rho", s.rho_path, "density-matrix or distribution JSON for the null hypothesis");
  cmd->add_option("--sigma", s.sigma_path, "density-matrix or distribution JSON for the alternative");
  cmd->add_option("--P", s.bern_p, "Bernoulli parameter shortcut for rho (diagonal state)");
  cmd->add_option("--Q", s.bern_q, "Bernoulli parameter shortcut for sigma");
}

std::pair<DensityMatrix, DensityMatrix> load_states(const StateArgs& s, RunManifest& man,
                                                    bool require_full_rank = true) {
  if (!s.rho_path.empty() && !s.sigma_path.empty()) {
    man.add_input_file(s.rho_path);
    man.add_input_file(s.sigma_path);
    return {read_state_or_distribution(s.rho_path, require_full_rank),
            read_state_or_distribution(s.sigma_path, require_full_rank)};
  }
  if (s.bern_p > 0.0 && s.bern_p < 1.0 && s.bern_q > 0.0 && s.bern_q < 1.0) {
    man.arguments["P"] = format_seventeen(s.bern_p);
    man.arguments["Q"] = format_seventeen(s.bern_q);
    return {embed_diagonal(ClassicalDistribution::bernoulli(s.bern_p)),
            embed_diagonal(ClassicalDistribution::bernoulli(s.bern_q))};
  }
  throw Error(ErrorKind::BadInput, "provide --rho/--sigma files or --P/--Q Bernoulli parameters");
}

// Writes `body` to --out (plus manifest) or to stdout.
void emit(const CommonArgs& c, RunManifest& man, const std::string& body) {
  if (!c.out_path.empty()) {
    std::ofstream f(c.out_path);
    if (!f) throw Error(ErrorKind::BadInput, "cannot write " + c.out_path);
    f << body;
    f.close();
    man.add_output_file(c.out_path);
    man.write(c.out_path + ".manifest.json");
  } else {
    man.add_output_bytes("stdout", body);
    std::cout << body;
  }
}

json stats_to_json(const types::TestStatistics& st) {
  json nats{{"log_alpha_bar", st.log_alpha_bar}, {"log_beta_bar", st.log_beta_bar},
            {"log_pi_P", st.log_pi_P},           {"log_pi_Q", st.log_pi_Q},
            {"log_incon_P", st.log_incon_P},     {"log_incon_Q", st.log_incon_Q}};
  json base2;
  for (auto& [k, v] : nats.items()) base2[k] = v.get<double>() / kLn2;
  return json{{"n", st.n},           {"exact", st.exact}, {"m_empty", st.m_empty},
              {"n_empty", st.n_empty}, {"nats", nats},      {"base2", base2}};
}

int run_divergence(const CommonArgs& c, const StateArgs& sa, const std::string& kind,
                   double s_order) {
  RunManifest man;
  man.command = "divergence";
  man.arguments["kind"] = kind;
  man.arguments["base"] = c.base;
  auto [rho, sigma] = load_states(sa, man, false);

  double value = 0.0;
  json extra;
  bool logarithmic = true;  // fidelity is a plain probability
  if (kind == "petz" || kind == "sandwiched" || kind == "reverse-sandwiched") {
    if (!(s_order > 0.0)) throw Error(ErrorKind::BadInput, "--s is required for Renyi divergences");
    man.arguments["s"] = format_seventeen(s_order);
    Family fam = kind == "petz"
                     ? Family::Petz
                     : (kind == "sandwiched" ? Family::Sandwiched : Family::ReverseSandwiched);
    value = renyi({fam, s_order}, rho, sigma);
  } else if (kind == "umegaki") {
    value = relative_entropy(rho, sigma);
  } else if (kind == "max") {
    value = max_relative_entropy(rho, sigma);
  } else if (kind == "zero") {
    value = min_relative_entropy_zero(rho, sigma);
  } else if (kind == "chernoff") {
    value = chernoff(rho, sigma);
  } else if (kind == "fidelity") {
    value = fidelity(rho, sigma);
    logarithmic = false;
  } else if (kind == "dstar") {
    DStarResult r = d_star_detailed(rho, sigma);
    if (r.disagreement > 1e-5)
      throw Error(ErrorKind::ConvergenceFailure, "d_star extrapolants disagree beyond 1e-5");
    value = r.value;
    extra["disagreement"] = r.disagreement;
    extra["bracket_ok"] = r.bracket_ok;
  } else if (kind == "omega" || kind == "xi") {
    ProjectiveMetrics m = projective_metrics(rho, sigma);
    value = kind == "omega" ? m.d_omega : m.d_xi;
  } else if (kind == "measured") {
    MeasuredResult m = measured_relative_entropy(rho, sigma);
    value = m.value;
    extra["optimizer_converged"] = m.converged;
  } else if (kind == "dplus") {
    value = d_plus(rho, sigma);
    DPlusSimplification simp = d_plus_simplification(rho, sigma);
    extra["condition_holds"] = simp.condition_holds;
    if (simp.simplified) extra["simplified"] = to_base(c, *simp.simplified);
  } else {
    throw Error(ErrorKind::BadInput, "unknown divergence kind: " + kind);
  }

  double shown = logarithmic ? to_base(c, value) : value;
  std::ostringstream body;
  if (c.as_json) {
    json j{{"kind", kind},
           {"value", shown},
           {"value_nats", logarithmic ? value : shown},
           {"unit", logarithmic ? (c.base == "2" ? "bits" : "nats") : "probability"},
           {"tool_version", kToolVersion}};
    if (!extra.is_null()) j["detail"] = extra;
    j["manifest"] = man.to_json();
    body << j.dump(2) << "\n";
  } else {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", shown);
    body << buf << "\n";
  }
  emit(c, man, body.str());
  return 0;
}

int run_region(const CommonArgs& c, const StateArgs& sa, const std::string& which, int samples,
               double big_k, double big_l, std::optional<double> z, const std::string& mode,
               std::optional<double> x_max) {
  RunManifest man;
  man.command = "region";
  man.arguments["which"] = which;
  man.arguments["samples"] = std::to_string(samples);
  man.arguments["base"] = c.base;
  auto kind = boundary_kind_from_string(which);
  if (!kind) throw Error(ErrorKind::BadInput, "unknown region: " + which);
  auto [rho, sigma] = load_states(sa, man);

  BoundaryParams params;
  params.K = from_base(c, big_k);
  params.L = from_base(c, big_l);
  params.mode = mode == "maximal" ? SymmetricMode::Maximal : SymmetricMode::Average;
  if (z) params.fixed_z = from_base(c, *z);
  if (x_max) params.x_max = from_base(c, *x_max);

  RegionBoundary b = boundary_scan(*kind, params, rho, sigma, samples);
  for (RegionPoint& p : b.samples) {
    p.x = to_base(c, p.x);
    p.y = to_base(c, p.y);
  }

  std::ostringstream body;
  if (c.as_json) {
    body << b.to_json() << "\n";
  } else {
    body << "x,y\n";
    for (const RegionPoint& p : b.samples)
      body << format_seventeen(p.x) << "," << format_seventeen(p.y) << "\n";
  }
  emit(c, man, body.str());
  return 0;
}

int run_simulate_classical(const CommonArgs& c, double p, double q, const std::string& p_file,
                           const std::string& q_file, std::int64_t n, const std::string& mode,
                           std::optional<double> delta, double big_k, double big_l, bool exact_only,
                           std::int64_t trials, std::uint64_t seed) {
  RunManifest man;
  man.command = "simulate-classical";
  man.arguments["mode"] = mode;
  man.arguments["n"] = std::to_string(n);
  man.seed = seed;

  ClassicalDistribution P, Q;
  if (!p_file.empty() && !q_file.empty()) {
    man.add_input_file(p_file);
    man.add_input_file(q_file);
    P = read_distribution(p_file);
    Q = read_distribution(q_file);
  } else if (p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
    P = ClassicalDistribution::bernoulli(p);
    Q = ClassicalDistribution::bernoulli(q);
    man.arguments["P"] = format_seventeen(p);
    man.arguments["Q"] = format_seventeen(q);
  } else {
    throw Error(ErrorKind::BadInput, "provide --P/--Q parameters or --P-file/--Q-file");
  }

  bool within_budget = true;
  try {
    types::check_type_budget(n, P.alphabet_size());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TooManyTypes) throw;
    within_budget = false;
    if (exact_only) throw;  // budget refusal, exit 4
  }

  types::TestStatistics st;
  double dlt = delta.value_or(std::pow(static_cast<double>(n), -1.0 / 3.0));
  double kn = from_base(c, big_k), ln = from_base(c, big_l);
  if (mode == "stein") {
    man.arguments["delta"] = format_seventeen(dlt);
    st = within_budget ? types::eval_stein_test(P, Q, n, dlt)
                       : types::monte_carlo_stein(P, Q, n, dlt, trials, seed);
  } else if (mode == "reject") {
    man.arguments["K"] = format_seventeen(big_k);
    man.arguments["L"] = format_seventeen(big_l);
    st = within_budget ? types::eval_reject_test(P, Q, n, kn, ln)
                       : types::monte_carlo_reject(P, Q, n, kn, ln, trials, seed);
  } else {
    throw Error(ErrorKind::BadInput, "mode must be stein or reject");
  }

  json j = stats_to_json(st);
  j["seed"] = seed;
  j["tool_version"] = kToolVersion;
  j["manifest"] = man.to_json();
  std::ostringstream body;
  body << j.dump(2) << "\n";
  emit(c, man, body.str());
  return 0;
}

json drift_to_json(const seq::DriftDiagnostic& d) {
  return json{{"martingale_part_scale", d.martingale_part_scale},
              {"negative_time_fraction", d.negative_time_fraction}};
}

int run_simulate_sequential(const CommonArgs& c, const StateArgs& sa, std::int64_t n,
                            double epsilon_bits, std::int64_t trials, std::uint64_t seed) {
  RunManifest man;
  man.command = "simulate-sequential";
  man.arguments["n"] = std::to_string(n);
  man.arguments["epsilon_bits"] = format_seventeen(epsilon_bits);
  man.arguments["trials"] = std::to_string(trials);
  man.seed = seed;
  auto [rho, sigma] = load_states(sa, man);

  auto tic = std::chrono::steady_clock::now();
  seq::MeasurementPair pair = seq::optimal_measurements(rho, sigma);
  seq::ProtocolConfig cfg = seq::make_config(pair, n, bits_to_nats(epsilon_bits), seed, trials);
  seq::SequentialReport r = seq::estimate_statistics(pair, cfg);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();

  json j;
  j["config"] = json{{"n", n},
                     {"epsilon_bits", epsilon_bits},
                     {"epsilon_nats", cfg.epsilon},
                     {"A_n", cfg.a_n},
                     {"B_n", cfg.b_n},
                     {"seed", seed},
                     {"trials", trials},
                     {"L_bound", cfg.l_bound},
                     {"achieved_D_M_fwd", pair.achieved_fwd},
                     {"achieved_D_M_rev", pair.achieved_rev},
                     {"optimizer_converged", pair.optimizer_converged}};
  j["statistics"] = stats_to_json(r.stats);
  j["intervals"] = json{{"alpha_bar", {r.alpha_interval.lo, r.alpha_interval.hi}},
                        {"beta_bar", {r.beta_interval.lo, r.beta_interval.hi}},
                        {"pi_rho", {r.pi_rho_interval.lo, r.pi_rho_interval.hi}},
                        {"pi_sigma", {r.pi_sigma_interval.lo, r.pi_sigma_interval.hi}}};
  j["counts"] = json{{"errors_rho", r.under_rho.errors},
                     {"errors_sigma", r.under_sigma.errors},
                     {"inconclusive_rho", r.under_rho.inconclusive},
                     {"inconclusive_sigma", r.under_sigma.inconclusive},
                     {"error_bound_type1", r.expected_type1_bound},
                     {"error_bound_type2", r.expected_type2_bound}};
  j["drift"] = json{{"mean_S_over_n_rho", r.mean_s_rho},
                    {"mean_S_over_n_sigma", r.mean_s_sigma},
                    {"under_rho", drift_to_json(r.drift_rho)},
                    {"under_sigma", drift_to_json(r.drift_sigma)},
                    {"azuma_fraction_rho", r.azuma_fraction_rho},
                    {"azuma_fraction_sigma", r.azuma_fraction_sigma},
                    {"azuma_bound", r.azuma_bound},
                    {"no_switch_fraction_rho", r.no_switch_fraction_rho}};
  j["wall_seconds"] = wall;
  j["tool_version"] = kToolVersion;
  j["manifest"] = man.to_json();
  std::ostringstream body;
  body << j.dump(2) << "\n";
  emit(c, man, body.str());
  return 0;
}

int run_pinching_scan(const CommonArgs& c, const StateArgs& sa, double s_order,
                      std::optional<double> hoeffding_a, int k_max, const std::string& direction) {
  RunManifest man;
  man.command = "pinching-scan";
  man.arguments["s"] = format_seventeen(s_order);
  man.arguments["k_max"] = std::to_string(k_max);
  man.arguments["direction"] = direction;
  auto [rho, sigma] = load_states(sa, man);
  PinchDirection dir;
  if (direction == "first")
    dir = PinchDirection::PinchFirstArg;
  else if (direction == "second")
    dir = PinchDirection::PinchSecondArg;
  else
    throw Error(ErrorKind::BadInput, "direction must be first or second");

  int d = rho.dim();
  double target = hoeffding_a ? pinched_hoeffding_target(from_base(c, *hoeffding_a), rho, sigma, dir)
                              : pinched_renyi_target(s_order, rho, sigma, dir);
  std::vector<double> rates(static_cast<std::size_t>(k_max));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int k = 1; k <= k_max; ++k) {
    rates[static_cast<std::size_t>(k - 1)] =
        hoeffding_a ? pinched_hoeffding_rate(from_base(c, *hoeffding_a), rho, sigma, k, dir)
                    : pinched_renyi_rate(s_order, rho, sigma, k, dir);
  }
  std::ostringstream body;
  body << "k,rate,target,gap,bound\n";
  for (int k = 1; k <= k_max; ++k) {
    double rate = rates[static_cast<std::size_t>(k - 1)];
    double bound = d * std::log(k + 1.0) / k;
    body << k << "," << format_seventeen(to_base(c, rate)) << ","
         << format_seventeen(to_base(c, target)) << ","
         << format_seventeen(to_base(c, target - rate)) << ","
         << format_seventeen(to_base(c, bound)) << "\n";
  }
  emit(c, man, body.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerics for hypothesis testing with inconclusive outcomes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // divergence
  CommonArgs dc;
  StateArgs dst;
  std::string d_kind;
  double d_s = -1.0;
  CLI::App* div = app.add_subcommand("divergence", "evaluate a divergence of two states");
  div->add_option("--kind", d_kind,
                  "petz|sandwiched|reverse-sandwiched|umegaki|max|zero|chernoff|fidelity|dstar|"
                  "omega|xi|measured|dplus")
      ->required();
  div->add_option("--s", d_s, "Renyi order");
  add_states(div, dst);
  add_common(div, dc);

  // region
  CommonArgs rc;
  StateArgs rst;
  std::string r_which, r_mode = "average";
  int r_samples = 128;
  double r_k = 0.0, r_l = 0.0;
  std::optional<double> r_z, r_xmax;
  CLI::App* reg = app.add_subcommand("region", "sample an achievable-region boundary curve");
  reg->add_option("--which", r_which,
                  "deterministic_hoeffding|high_conclusiveness|onesided|conclusive_KL_slice|"
                  "classical_reject|symmetric")
      ->required();
  reg->add_option("--samples", r_samples, "number of grid points");
  reg->add_option("--K", r_k, "conclusiveness exponent under rho");
  reg->add_option("--L", r_l, "conclusiveness exponent under sigma");
  reg->add_option(
      "--Z",
      [&r_z](const std::vector<std::string>& v) {
        r_z = std::stod(v[0]);
        return true;
      },
      "evaluate the symmetric boundary at a single Z");
  reg->add_option(
      "--x-max",
      [&r_xmax](const std::vector<std::string>& v) {
        r_xmax = std::stod(v[0]);
        return true;
      },
      "override the scan range");
  reg->add_option("--mode", r_mode, "average|maximal (symmetric regime)")
      ->check(CLI::IsMember({"average", "maximal"}));
  add_states(reg, rst);
  add_common(reg, rc);

  // simulate-classical
  CommonArgs cc;
  double c_p = -1.0, c_q = -1.0, c_k = 0.0, c_l = 0.0;
  std::string c_pfile, c_qfile, c_mode = "stein";
  std::int64_t c_n = 0, c_trials = 100000;
  std::uint64_t c_seed = 0x5EED;
  std::optional<double> c_delta;
  bool c_exact = false;
  CLI::App* sc = app.add_subcommand("simulate-classical", "exact type-enumeration test statistics");
  sc->add_option("--P", c_p, "Bernoulli parameter of P");
  sc->add_option("--Q", c_q, "Bernoulli parameter of Q");
  sc->add_option("--P-file", c_pfile, "distribution JSON for P");
  sc->add_option("--Q-file", c_qfile, "distribution JSON for Q");
  sc->add_option("--n", c_n, "number of copies")->required();
  sc->add_option("--mode", c_mode, "stein|reject")->check(CLI::IsMember({"stein", "reject"}));
  sc->add_option(
      "--delta",
      [&c_delta](const std::vector<std::string>& v) {
        c_delta = std::stod(v[0]);
        return true;
      },
      "typicality radius (default n^(-1/3))");
  sc->add_option("--K", c_k, "conclusiveness exponent under P (reject mode)");
  sc->add_option("--L", c_l, "conclusiveness exponent under Q (reject mode)");
  sc->add_flag("--exact", c_exact,
               "refuse instead of falling back to Monte Carlo beyond the type budget");
  sc->add_option("--trials", c_trials, "Monte Carlo trials for the fallback");
  sc->add_option("--seed", c_seed, "Monte Carlo seed");
  add_common(sc, cc);

  // simulate-sequential
  CommonArgs qc;
  StateArgs qst;
  std::int64_t q_n = 0, q_trials = 0;
  double q_eps = 0.0;
  std::uint64_t q_seed = 0x5EED;
  CLI::App* sq =
      app.add_subcommand("simulate-sequential", "adaptive two-measurement protocol Monte Carlo");
  sq->add_option("--n", q_n, "copies per trial")->required();
  sq->add_option("--epsilon-bits", q_eps, "threshold slack in bits")->required();
  sq->add_option("--trials", q_trials, "Monte Carlo trials")->required();
  sq->add_option("--seed", q_seed, "RNG seed");
  add_states(sq, qst);
  add_common(sq, qc);

  // pinching-scan
  CommonArgs pc;
  StateArgs pst;
  double p_s = 0.7;
  std::optional<double> p_a;
  int p_kmax = 8;
  std::string p_dir = "first";
  CLI::App* pscan = app.add_subcommand("pinching-scan", "k-copy pinched divergence rates");
  pscan->add_option("--s", p_s, "Renyi order (1 = relative entropy)");
  pscan->add_option(
      "--A",
      [&p_a](const std::vector<std::string>& v) {
        p_a = std::stod(v[0]);
        return true;
      },
      "Hoeffding threshold; switches the scan to Hoeffding rates");
  pscan->add_option("--k-max", p_kmax, "largest block size");
  pscan->add_option("--direction", p_dir, "first|second (which argument is pinched)");
  add_states(pscan, pst);
  add_common(pscan, pc);

  // verify
  std::string v_suite = "all";
  std::string v_base = "e";  // accepted for interface uniformity; rows carry their own units
  bool v_json = false;
  int v_threads = 0;
  CLI::App* ver = app.add_subcommand("verify", "run the acceptance checks");
  ver->add_option("--suite", v_suite, "divergences|regions|classical|sequential|pinching|all");
  ver->add_option("--base", v_base, "accepted for uniformity; check rows state their own units")
      ->check(CLI::IsMember({"e", "2"}));
  ver->add_flag("--json", v_json, "emit the report as JSON");
  ver->add_option("--threads", v_threads, "cap the number of worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc_code = app.exit(e);
    return rc_code == 0 ? 0 : 2;
  }

  try {
    if (div->parsed()) {
      par::set_threads(dc.threads);
      return run_divergence(dc, dst, d_kind, d_s);
    }
    if (reg->parsed()) {
      par::set_threads(rc.threads);
      return run_region(rc, rst, r_which, r_samples, r_k, r_l, r_z, r_mode, r_xmax);
    }
    if (sc->parsed()) {
      par::set_threads(cc.threads);
      return run_simulate_classical(cc, c_p, c_q, c_pfile, c_qfile, c_n, c_mode, c_delta, c_k, c_l,
                                    c_exact, c_trials, c_seed);
    }
    if (sq->parsed()) {
      par::set_threads(qc.threads);
      return run_simulate_sequential(qc, qst, q_n, q_eps, q_trials, q_seed);
    }
    if (pscan->parsed()) {
      par::set_threads(pc.threads);
      return run_pinching_scan(pc, pst, p_s, p_a, p_kmax, p_dir);
    }
    if (ver->parsed()) {
      par::set_threads(v_threads);
      if (!verify::is_suite(v_suite)) {
        std::cerr << "unknown suite: " << v_suite << "\n";
        return 2;
      }
      return verify::run_suite(v_suite, std::cout, v_json) ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
