#include "qht/pinching.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "qht/regions.hpp"
#include "qht/scalars.hpp"
#include "qht/types_engine.hpp"

namespace qht {

PinchingBasis build_pinching_basis(const DensityMatrix& s, double rel_tol) {
  const HermitianSpectrum& es = s.spectrum();
  int n = s.dim();
  PinchingBasis out;
  out.cluster_tol = rel_tol;
  int start = 0;
  while (start < n) {
    int end = start + 1;
    double head = es.eigenvalues[static_cast<std::size_t>(start)];
    while (end < n &&
           std::abs(es.eigenvalues[static_cast<std::size_t>(end)] - head) <= rel_tol * std::abs(head))
      ++end;
    Matrix proj(n);
    for (int c = start; c < end; ++c)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          proj(i, j) += es.eigenvectors(i, c) * std::conj(es.eigenvectors(j, c));
    out.clustered_eigenvalues.push_back(head);
    out.projectors.push_back(proj);
    start = end;
  }
  return out;
}

Matrix pinch(const DensityMatrix& basis_state, const Matrix& x) {
  PinchingBasis b = build_pinching_basis(basis_state);
  Matrix out(x.dim());
  for (const Matrix& p : b.projectors) out += p * x * p;
  assert(std::abs((out.trace() - x.trace()).real()) <= 1e-9 * std::max(1.0, std::abs(x.trace().real())));
  assert(commutator_norm(out, basis_state.mat()) <=
         1e-9 * std::max(1.0, out.frobenius() * basis_state.mat().frobenius()));
  return out;
}

void pinched_tensor_pair(const DensityMatrix& basis, const DensityMatrix& other, int k,
                         std::vector<double>& basis_vals, std::vector<double>& other_eigs) {
  int d = basis.dim();
  double total = std::pow(static_cast<double>(d), k);
  if (k < 1 || total > 256.0)
    throw Error(ErrorKind::DimensionBudget, "tensor-power dimension exceeds the dense budget of 256");
  int dk = static_cast<int>(total);

  const HermitianSpectrum& sb = basis.spectrum();
  // single-copy matrix elements of `other` in the eigenbasis of `basis`
  Matrix r(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      cplx s = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          s += std::conj(sb.eigenvectors(a, i)) * other.mat()(a, b) * sb.eigenvectors(b, j);
      r(i, j) = s;
    }

  std::vector<double> log_l(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    double ev = sb.eigenvalues[static_cast<std::size_t>(i)];
    if (ev <= 0.0) throw Error(ErrorKind::RankDeficient, "pinching basis state must be full rank");
    log_l[static_cast<std::size_t>(i)] = std::log(ev);
  }

  // product eigenvalue of basis^(k) for each index tuple, clustered by value
  std::vector<double> tuple_log(static_cast<std::size_t>(dk), 0.0);
  for (int t = 0; t < dk; ++t) {
    int x = t;
    for (int c = 0; c < k; ++c) {
      tuple_log[static_cast<std::size_t>(t)] += log_l[static_cast<std::size_t>(x % d)];
      x /= d;
    }
  }
  std::vector<int> order(static_cast<std::size_t>(dk));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return tuple_log[static_cast<std::size_t>(a)] > tuple_log[static_cast<std::size_t>(b)];
  });

  basis_vals.clear();
  other_eigs.clear();
  basis_vals.reserve(static_cast<std::size_t>(dk));
  other_eigs.reserve(static_cast<std::size_t>(dk));

  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    double head = tuple_log[static_cast<std::size_t>(order[start])];
    // distinct-product collisions must merge, or the block structure is wrong
    while (end < order.size() &&
           head - tuple_log[static_cast<std::size_t>(order[end])] <= 1e-10 * std::max(1.0, std::abs(head)))
      ++end;
    int m = static_cast<int>(end - start);
    Matrix block(m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        int ta = order[start + static_cast<std::size_t>(a)];
        int tb = order[start + static_cast<std::size_t>(b)];
        cplx prod = 1.0;
        for (int c = 0; c < k; ++c) {
          prod *= r(ta % d, tb % d);
          ta /= d;
          tb /= d;
        }
        block(a, b) = prod;
      }
    HermitianSpectrum bs = eig(block, 1e-8);
    double val = std::exp(head);
    for (int i = 0; i < m; ++i) {
      basis_vals.push_back(val);
      other_eigs.push_back(std::max(bs.eigenvalues[static_cast<std::size_t>(i)], 0.0));
    }
    start = end;
  }
}

namespace {

double classical_petz(const std::vector<double>& p, const std::vector<double>& q, double s) {
  RenyiKernels k(ClassicalDistribution{p}, ClassicalDistribution{q});
  if (s == 1.0) return k.kl();
  return k.petz(s);
}

}  // namespace

double pinched_renyi_rate(double s, const DensityMatrix& rho, const DensityMatrix& sigma, int k,
                          PinchDirection direction) {
  if (direction == PinchDirection::PinchFirstArg) {
    if (!(s > 0.0 && s <= 2.0))
      throw Error(ErrorKind::UnsupportedOrder, "pinch-first rate needs s in (0, 2]");
    std::vector<double> sig_vals, rho_eigs;
    pinched_tensor_pair(sigma, rho, k, sig_vals, rho_eigs);
    return classical_petz(rho_eigs, sig_vals, s) / k;
  }
  if (!(s > 0.0 && s <= 1.0))
    throw Error(ErrorKind::UnsupportedOrder, "pinch-second rate needs s in (0, 1]");
  std::vector<double> rho_vals, sig_eigs;
  pinched_tensor_pair(rho, sigma, k, rho_vals, sig_eigs);
  return classical_petz(rho_vals, sig_eigs, s) / k;
}

double pinched_renyi_target(double s, const DensityMatrix& rho, const DensityMatrix& sigma,
                            PinchDirection direction) {
  RenyiKernels k_rs(rho, sigma);
  if (direction == PinchDirection::PinchFirstArg)
    return s == 1.0 ? k_rs.kl() : k_rs.sandwiched(s);
  return s == 1.0 ? d_star(rho, sigma) : k_rs.reverse_sandwiched(s);
}

std::int64_t spectrum_count(const DensityMatrix& sigma, int k) {
  if (k < 1 || k > 12) throw Error(ErrorKind::DimensionBudget, "spectrum_count supports k <= 12");
  int d = sigma.dim();
  std::vector<double> log_l(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    log_l[static_cast<std::size_t>(i)] =
        std::log(std::max(sigma.spectrum().eigenvalues[static_cast<std::size_t>(i)], 1e-300));

  // one candidate product per multiset of eigenvalue indices
  std::vector<double> products;
  types::TypeVector t = types::first_type(k, d);
  do {
    double lp = 0.0;
    for (int i = 0; i < d; ++i)
      lp += static_cast<double>(t.counts[static_cast<std::size_t>(i)]) * log_l[static_cast<std::size_t>(i)];
    products.push_back(lp);
  } while (types::next_type(t));

  std::sort(products.begin(), products.end(), std::greater<double>());
  std::int64_t clusters = 0;
  std::size_t i = 0;
  while (i < products.size()) {
    std::size_t j = i + 1;
    while (j < products.size() &&
           products[i] - products[j] <= 1e-10 * std::max(1.0, std::abs(products[i])))
      ++j;
    ++clusters;
    i = j;
  }
  return clusters;
}

double pinched_hoeffding_rate(double a, const DensityMatrix& rho, const DensityMatrix& sigma,
                              int k, PinchDirection direction) {
  if (a < 0.0) throw Error(ErrorKind::BadInput, "threshold must be nonnegative");
  std::vector<double> first, second;
  if (direction == PinchDirection::PinchFirstArg) {
    std::vector<double> sig_vals, rho_eigs;
    pinched_tensor_pair(sigma, rho, k, sig_vals, rho_eigs);
    first = rho_eigs;
    second = sig_vals;
  } else {
    std::vector<double> rho_vals, sig_eigs;
    pinched_tensor_pair(rho, sigma, k, rho_vals, sig_eigs);
    first = rho_vals;
    second = sig_eigs;
  }
  RenyiKernels kk(ClassicalDistribution{first}, ClassicalDistribution{second});
  return hoeffding_div(kk, Family::Petz, a * k) / k;
}

double pinched_hoeffding_target(double a, const DensityMatrix& rho, const DensityMatrix& sigma,
                                PinchDirection direction) {
  RenyiKernels k_rs(rho, sigma);
  Family f = direction == PinchDirection::PinchFirstArg ? Family::Sandwiched
                                                        : Family::ReverseSandwiched;
  return hoeffding_div(k_rs, f, a);
}

}  // namespace qht
