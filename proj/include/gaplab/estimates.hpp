#pragma once

#include <string>

namespace gaplab {

// Closed-form estimators for the perturbative-window boundary and the typical
// minimum gap. n0 and a_const are order-one convention constants that the
// underlying analysis never pins; both default to 1 and are carried in the
// result so downstream output is self-describing.
struct GapEstimate {
  double lambda_star = 0.0;
  double delta_min = 0.0;
  double v_alpha = 0.0;
  double n0 = 1.0;
  double a_const = 1.0;
};

// sqrt(2) * f2^(-1/4) * N^(-1/8): the coupling below which the second-order
// splitting scale sqrt(N) f2 lambda^4 stays under the classical spacing.
double lambda_star(double f2, int n_bits);

// v(alpha) = (4/9)(1 - exp(-3 alpha)); delta_min = exp(-(v N / 8) ln(N / N0)).
GapEstimate min_gap_estimate(int n_bits, double alpha, double n0 = 1.0, double a_const = 1.0,
                             double f2 = 0.18);

// Bound form |V12| < (A lambda)^n.
double v12_bound(double a_const, double lambda, int n);

// Schedule reparametrization lambda = (1-s)/s and its inverse s = 1/(1+lambda).
double lambda_from_s(double s);
double s_from_lambda(double lambda);

// Advisory order-of-magnitude boundary of the perturbative regime, 1/ln N.
double lambda_cr_estimate(int n_bits);

std::string gap_estimate_to_json(const GapEstimate& g);

}  // namespace gaplab
