#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qht/divergences.hpp"

namespace qht {

// ------------------------- domain types ---------------------------------

struct ExponentQuery {
  double A = 0.0;  // type-I conditional error exponent
  double B = 0.0;  // type-II
  double K = 0.0;  // conclusiveness-decay exponent under rho
  double L = 0.0;  // under sigma
};

enum class SymmetricMode { Average, Maximal };

struct SymmetricQuery {
  double E = 0.0;
  double Z = 0.0;
  double prior = 0.5;  // strictly interior
  SymmetricMode mode = SymmetricMode::Average;
};

struct RegionPoint {
  double x, y;
};

struct RegionBoundary {
  std::vector<RegionPoint> samples;  // x strictly increasing
  std::string x_label, y_label;
  std::string meta;  // generator description; notes clipping if it occurred

  void write_csv(const std::string& path) const;
  std::string to_json() const;
};

enum class BoundaryKind {
  DeterministicHoeffding,
  HighConclusiveness,
  Onesided,
  ConclusiveKLSlice,
  ClassicalReject,
  Symmetric,
};

std::optional<BoundaryKind> boundary_kind_from_string(const std::string& name);

struct BoundaryParams {
  double K = 0.0;
  double L = 0.0;
  SymmetricMode mode = SymmetricMode::Average;
  std::optional<double> x_max;    // overrides the regime default
  std::optional<double> fixed_z;  // symmetric regime: evaluate a single Z
};

// ------------------------- kernel-level formulas -------------------------
// These take a RenyiKernels for the ordered argument pair, so scans can
// reuse the spectral caches.  All in nats.

// H_a for the chosen Rényi family: sup over s in (0,1) of ((s-1)/s)(a - D_s).
double hoeffding_div(const RenyiKernels& k, Family family, double a);

// Han-Kobayashi anti-divergence: sup over s > 1 of ((s-1)/s)(r - tilde D_s).
double han_kobayashi_div(const RenyiKernels& k, double r);

// Threshold above which the anti-divergence is exactly r - D_max.
double han_kobayashi_linear_threshold_div(const RenyiKernels& k);

// inf over t > 1 of ( t/(t-1) * coeff + tilde D_t )
double conclusive_inf(const RenyiKernels& k, double coeff);

// inf over s > 1 of ( z/(s-1) + tilde D_s )
double symmetric_inf(const RenyiKernels& k, double z);

// ------------------------- public operations ----------------------------

double hoeffding(double a, const DensityMatrix& rho, const DensityMatrix& sigma, Family family);
double han_kobayashi(double r, const DensityMatrix& rho, const DensityMatrix& sigma);
double han_kobayashi_linear_threshold(const DensityMatrix& rho, const DensityMatrix& sigma);

struct ConclusiveRegionResult {
  bool inside;
  double slack1;  // A-side constraint: RHS - (A+K)
  double slack2;  // B-side constraint: RHS - (B+L)
};
ConclusiveRegionResult conclusive_region(const ExponentQuery& q, const DensityMatrix& rho,
                                         const DensityMatrix& sigma);

// The two constraint ceilings of the conclusive region for given (K, L):
// A + K <= first, B + L <= second.
std::pair<double, double> conclusive_thresholds(double big_k, double big_l,
                                                const DensityMatrix& rho, const DensityMatrix& sigma);

// Smallest K for which some L >= 0 makes (A, B, K, L) feasible; +inf when
// even unconstrained conclusiveness cannot reach (A, B).
double min_conclusiveness_exponent(double a, double b, const DensityMatrix& rho,
                                   const DensityMatrix& sigma);

double onesided_boundary(double a, const DensityMatrix& rho, const DensityMatrix& sigma);

double d_plus(const DensityMatrix& sigma, const DensityMatrix& rho);

struct DPlusSimplification {
  bool condition_holds;
  std::optional<double> simplified;
  double condition_lhs;  // D(rho||sigma) + D_max(sigma||rho)
  double condition_rhs;  // -log Tr Pi exp(Pi log(rho) Pi)
};
DPlusSimplification d_plus_simplification(const DensityMatrix& sigma, const DensityMatrix& rho);

double classical_reject_region(double a, double big_k, double big_l,
                               const ClassicalDistribution& p, const ClassicalDistribution& q);

struct QuantumRejectRegion {
  double achievable_B;
  double converse_B;
};
QuantumRejectRegion quantum_reject_region(double a, double big_k, double big_l,
                                          const DensityMatrix& rho, const DensityMatrix& sigma);

double symmetric_boundary(const SymmetricQuery& q, const DensityMatrix& rho,
                          const DensityMatrix& sigma);

RegionBoundary boundary_scan(BoundaryKind which, const BoundaryParams& params,
                             const DensityMatrix& rho, const DensityMatrix& sigma, int samples);

}  // namespace qht
