#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaplab/instance.hpp"
#include "gaplab/solver.hpp"

namespace gaplab {

// Even-order expansion of the energy level that connects to |sigma> as the
// transverse coupling is switched on:
//   E(lambda) = base_energy + sum_{m=1..max_order} lambda^{2m} f[m-1]
// Coefficients follow the textbook Rayleigh-Schrodinger sign convention with
// hopping amplitude -lambda. Free bits are factored out before expansion
// (reduced = true); on the ground branch each contributes exactly -lambda.
struct SeriesCoefficients {
  Assignment center;
  long long base_energy = 0;
  int max_order = 0;
  std::vector<double> f;  // f[m-1] = F^(m)
  bool reduced = true;

  double eval(double lambda) const {
    const double l2 = lambda * lambda;
    double acc = 0, p = 1;
    for (double c : f) {
      p *= l2;
      acc += p * c;
    }
    return double(base_energy) + acc;
  }
};

// Linked-cluster evaluation of the series: connected subsets of the coupling
// graph (bits sharing a clause) up to max_order bits, each solved exactly on
// its sub-hypercube and Moebius-subtracted so only its connected part
// contributes. Exact rational arithmetic with a floating-point fallback once
// intermediates overflow 128 bits. max_order in [1,3].
// Throws DegenerateNeighborhoodError when another assignment of equal cost
// sits within Hamming distance 2*max_order of sigma on the non-free bits.
SeriesCoefficients series_coefficients(const Instance& inst, const Assignment& sigma,
                                       int max_order);

// Componentwise difference of the two solutions' coefficients,
// d[m-1] = F^(m)(sigma1) - F^(m)(sigma2). The m = 1 entry vanishes
// identically for solution pairs. Requires distance > 2*max_order so
// tunneling between the pair cannot contaminate either series.
struct SplittingSeries {
  SolutionPair pair;
  int max_order = 0;
  std::vector<double> d;
};

SplittingSeries splitting(const Instance& inst, const SolutionPair& pair, int max_order);

std::string series_to_json(const SeriesCoefficients& s);
std::string splitting_to_json(const SplittingSeries& s);

namespace detail {

// Equal-cost assignment within the given Hamming radius of sigma on the
// non-free bits, if one exists. Solution centers use a connected-subset walk
// of the coupling graph (complete for cost-0 centers); other centers fall
// back to plain local enumeration.
std::optional<Assignment> find_equal_energy_within(const Instance& inst, const Assignment& sigma,
                                                   int radius);

// Moebius cumulant w^(m)(bits) of the level series around sigma, m = 1..orders
// (index 0 = m=1). Zero (exactly, up to fallback rounding) when bits do not
// form a connected set of the coupling graph.
std::vector<double> subset_cumulant(const Instance& inst, const Assignment& sigma,
                                    const std::vector<int>& bits, int orders);

}  // namespace detail

}  // namespace gaplab
