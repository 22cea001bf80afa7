#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "qht/linalg.hpp"

namespace qht {

enum class Family { Petz, Sandwiched, ReverseSandwiched };

struct DivergenceFamily {
  Family tag;
  double s;
};

// Log-domain eigenvalues of diag(exp(c)) * W * diag(exp(c)) for Hermitian
// positive-definite W and arbitrary scale exponents c (which may be far
// outside the range representable by doubles once exponentiated).  The basis
// is split where scale gaps exceed ~300 log-units; blocks are coupled through
// Schur complements, so the neglected interaction is suppressed by exp(-600).
std::vector<double> graded_sandwich_log_eigs(const std::vector<double>& c, const Matrix& w);

// Rényi machinery for one ordered pair (X, Y).  Quantum pairs precompute the
// spectra and the overlap matrix once; classical pairs use scalar formulas.
// All outputs in nats.
class RenyiKernels {
 public:
  RenyiKernels(const DensityMatrix& x, const DensityMatrix& y);
  RenyiKernels(const ClassicalDistribution& p, const ClassicalDistribution& q);

  // log Tr X^s Y^(1-s)
  double petz_log_trace(double s) const;
  // Petz-Rényi divergence, any s > 0, s != 1
  double petz(double s) const;
  // sandwiched Rényi divergence, any s > 0, s != 1
  double sandwiched(double s) const;
  // reverse sandwiched: (s/(1-s)) * sandwiched_(1-s) with arguments swapped
  double reverse_sandwiched(double s) const;

  double kl() const;    // D(X || Y)
  double dmax() const;  // max-relative entropy
  double d0() const;    // -log Tr Pi_X Y

  bool classical() const { return classical_; }
  int dim() const { return classical_ ? static_cast<int>(p_.size()) : x_.dim(); }

  const RenyiKernels& swapped() const;  // kernels for (Y, X)

  RenyiKernels(const RenyiKernels&) = delete;
  RenyiKernels& operator=(const RenyiKernels&) = delete;

 private:
  RenyiKernels() = default;
  void init_quantum();

  bool classical_ = false;
  DensityMatrix x_, y_;
  std::vector<double> p_, q_;  // classical probabilities

  // quantum caches
  std::vector<double> log_ex_, log_ey_;
  std::vector<double> overlap_;  // |<x_i|y_j>|^2 row-major
  Matrix x_in_y_basis_;

  // lazily computed, guarded so concurrent scans can share one kernel
  mutable std::mutex lazy_mu_;
  mutable std::optional<double> dmax_, kl_;
  mutable std::shared_ptr<RenyiKernels> swapped_;
};

double renyi(const DivergenceFamily& family, const DensityMatrix& rho, const DensityMatrix& sigma);
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
double max_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
double min_relative_entropy_zero(const DensityMatrix& rho, const DensityMatrix& sigma);
double chernoff(const DensityMatrix& rho, const DensityMatrix& sigma);
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct ProjectiveMetrics {
  double d_omega;  // sum of the two max-relative entropies
  double d_xi;     // max of the two
};
ProjectiveMetrics projective_metrics(const DensityMatrix& rho, const DensityMatrix& sigma);

struct DStarResult {
  double value;
  double disagreement;  // between successive extrapolants
  double bracket_lo;    // -log F
  double bracket_hi;    // D(rho || sigma)
  bool bracket_ok;
};
DStarResult d_star_detailed(const DensityMatrix& rho, const DensityMatrix& sigma);
double d_star(const DensityMatrix& rho, const DensityMatrix& sigma);

struct MeasuredOptions {
  int restarts = 8;
  int max_sweeps = 60;
  std::uint64_t seed = 0x5EED;
};

struct MeasuredResult {
  double value;   // best D(M(rho) || M(sigma)) found, nats
  Matrix basis;   // measurement basis, columns are rank-one projector vectors
  bool converged; // false => OptimizerStalled, value is best-so-far
};

MeasuredResult measured_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                                         const MeasuredOptions& opts = {});

// KL of the outcome distributions of a projective measurement given by basis columns.
double measurement_kl(const Matrix& basis, const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace qht
