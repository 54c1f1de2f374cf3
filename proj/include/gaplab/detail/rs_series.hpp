#pragma once

#include <vector>

#include "gaplab/errors.hpp"

namespace gaplab::detail {

// Order-by-order eigenvalue series for H(x) = diag + x*V on a sub-hypercube,
// expanded around basis state 0 (which must be nondegenerate with respect to
// every other diagonal entry). diag is indexed by submask over n_sub flip
// bits; V hops with amplitude -1 between submask neighbors.
//
// Recursion (intermediate normalization <0|psi_k> = 0 for k >= 1):
//   E_k = (V psi_{k-1})_0
//   (d_0 - d_j) psi_k[j] = (V psi_{k-1})_j - sum_{l=1}^{k-1} E_l psi_{k-l}[j]
//
// Works over double or the exact Rational; returns E[0..orders].
template <typename T>
std::vector<T> rs_energy_series(const std::vector<long long>& diag, int n_sub, int orders) {
  const int dim = 1 << n_sub;
  std::vector<std::vector<T>> psi(std::size_t(orders) + 1, std::vector<T>(std::size_t(dim), T(0)));
  std::vector<T> e(std::size_t(orders) + 1, T(0));
  psi[0][0] = T(1);
  e[0] = T(diag[0]);
  for (int k = 1; k <= orders; ++k) {
    {
      T acc(0);
      for (int t = 0; t < n_sub; ++t) acc = acc + psi[std::size_t(k - 1)][std::size_t(1) << t];
      e[std::size_t(k)] = T(0) - acc;
    }
    for (int j = 1; j < dim; ++j) {
      T num(0);
      for (int t = 0; t < n_sub; ++t) num = num - psi[std::size_t(k - 1)][std::size_t(j ^ (1 << t))];
      for (int l = 1; l < k; ++l)
        num = num - e[std::size_t(l)] * psi[std::size_t(k - l)][std::size_t(j)];
      const long long gap = diag[0] - diag[std::size_t(j)];
      if (gap == 0)
        throw InvalidParameterError("degenerate diagonal reached the series recursion");
      psi[std::size_t(k)][std::size_t(j)] = num / T(gap);
    }
  }
  return e;
}

}  // namespace gaplab::detail
