#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gaplab/instance.hpp"

namespace gaplab {

// Amplitudes over the 2^N assignment basis, indexed by bitmask (bit i-1 of
// the index holds x_i).
using StateVector = std::vector<double>;

enum class EigMethod { kAuto, kDense, kIterative };

struct SpectrumResult {
  double lambda = 0.0;
  std::vector<double> eigenvalues;          // ascending, length k
  std::vector<StateVector> eigenvectors;    // empty when vectors not requested
  double gap = 0.0;                         // eigenvalues[1] - eigenvalues[0] when k >= 2
  std::vector<double> residual_norms;       // ||Hv - Ev|| per returned pair
};

// (Hv)_sigma = E_P(sigma) v_sigma - lambda * sum_i v_{sigma xor e_i}.
// N <= 28; the diagonal is precomputed below a size threshold and walked on
// the fly above it.
StateVector apply_hamiltonian(const Instance& inst, double lambda, const StateVector& v);

// Lowest k eigenpairs: dense full diagonalization for N <= 12, Krylov with
// full reorthogonalization for N <= 24 (residual tolerance 1e-10 * (M + lambda N)),
// and an exact diagonal sort at lambda = 0.
SpectrumResult lowest_eigenpairs(const Instance& inst, double lambda, int k,
                                 EigMethod method = EigMethod::kAuto, bool want_vectors = true);

struct GapPoint {
  double lambda = 0.0;
  double gap = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
};

std::vector<GapPoint> gap_curve(const Instance& inst, const std::vector<double>& lambdas,
                                EigMethod method = EigMethod::kAuto);

// CSV with header "lambda,gap,e0,e1", 17 significant digits.
std::string gap_curve_to_csv(const std::vector<GapPoint>& points);

struct MinGapResult {
  double lambda_min = 0.0;
  double gap_min = 0.0;
};

// 64-point coarse grid over [lo, hi], then golden-section refinement of the
// smallest bracket to width <= tol; returns the endpoint when the coarse
// minimum sits on the boundary.
MinGapResult min_gap_scan(const Instance& inst, double lo, double hi, double tol,
                          EigMethod method = EigMethod::kAuto);

// Squared amplitude of eigenvector `which` at the basis state x.
double eigenstate_overlap(const SpectrumResult& result, std::size_t which, const Assignment& x);

// Squared ground-state amplitude at the basis state x.
double ground_state_overlap(const SpectrumResult& result, const Assignment& x);

namespace detail {

// Shared minimizer behind min_gap_scan, exposed for direct testing against
// synthetic curves.
std::pair<double, double> minimize_on_grid(const std::function<double(double)>& f, double lo,
                                           double hi, double tol);

}  // namespace detail

}  // namespace gaplab
