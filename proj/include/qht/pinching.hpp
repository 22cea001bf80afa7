#pragma once

#include <vector>

#include "qht/divergences.hpp"
#include "qht/linalg.hpp"

namespace qht {

// Spectral structure of a state used by the pinching map: one projector per
// (near-)degenerate eigenvalue cluster.
struct PinchingBasis {
  std::vector<double> clustered_eigenvalues;
  std::vector<Matrix> projectors;
  double cluster_tol;
};

PinchingBasis build_pinching_basis(const DensityMatrix& s, double rel_tol = 1e-10);

// E_sigma(X) = sum_i P_i X P_i
Matrix pinch(const DensityMatrix& basis_state, const Matrix& x);

enum class PinchDirection { PinchFirstArg, PinchSecondArg };

// Classical pair of the k-copy pinched states, flattened over eigenvalue
// clusters.  `basis_vals` holds the cluster eigenvalue of basis^(k) at each
// position and `other_eigs` the matching block eigenvalue of the pinched
// other^(k).  Tensor-power matrix elements factorise over copies, so blocks
// are assembled from single-copy data; the dense budget is basis_dim^k <= 256.
void pinched_tensor_pair(const DensityMatrix& basis, const DensityMatrix& other, int k,
                         std::vector<double>& basis_vals, std::vector<double>& other_eigs);

// (1/k) D_s of the pinched k-copy pair.  PinchFirstArg computes
// D_s(E_{sigma^k}(rho^k) || sigma^k)/k (valid s in (0,2], s=1 meaning the
// relative entropy); PinchSecondArg computes D_s(rho^k || E_{rho^k}(sigma^k))/k
// (valid s in (0,1]).
double pinched_renyi_rate(double s, const DensityMatrix& rho, const DensityMatrix& sigma, int k,
                          PinchDirection direction);

// asymptotic target of the rate above: tilde D_s / D for the first direction,
// hat D_s / D* for the second
double pinched_renyi_target(double s, const DensityMatrix& rho, const DensityMatrix& sigma,
                            PinchDirection direction);

// number of eigenvalue clusters of sigma^(tensor k); k <= 12
std::int64_t spectrum_count(const DensityMatrix& sigma, int k);

// (1/k) H_{a k} of the pinched k-copy pair, converging to the sandwiched
// (first direction) or reverse-sandwiched (second) Hoeffding divergence.
double pinched_hoeffding_rate(double a, const DensityMatrix& rho, const DensityMatrix& sigma,
                              int k, PinchDirection direction);

double pinched_hoeffding_target(double a, const DensityMatrix& rho, const DensityMatrix& sigma,
                                PinchDirection direction);

}  // namespace qht
