#include "gaplab/estimates.hpp"

#include <cmath>

#include <json.hpp>

#include "gaplab/errors.hpp"

namespace gaplab {

double lambda_star(double f2, int n_bits) {
  if (!(f2 > 0.0)) throw InvalidParameterError("f2 must be positive");
  if (n_bits < 1) throw InvalidParameterError("n_bits must be positive");
  return std::sqrt(2.0) * std::pow(f2, -0.25) * std::pow(double(n_bits), -0.125);
}

GapEstimate min_gap_estimate(int n_bits, double alpha, double n0, double a_const, double f2) {
  if (!(n0 > 0.0)) throw InvalidParameterError("n0 must be positive");
  if (!(double(n_bits) > n0)) throw InvalidParameterError("n_bits must exceed n0");
  if (!(alpha > 0.0)) throw InvalidParameterError("alpha must be positive");
  GapEstimate g;
  g.n0 = n0;
  g.a_const = a_const;
  g.v_alpha = (4.0 / 9.0) * (1.0 - std::exp(-3.0 * alpha));
  g.delta_min = std::exp(-(g.v_alpha * double(n_bits) / 8.0) * std::log(double(n_bits) / n0));
  g.lambda_star = lambda_star(f2, n_bits);
  return g;
}

double v12_bound(double a_const, double lambda, int n) {
  if (!(a_const > 0.0) || !(lambda >= 0.0)) throw InvalidParameterError("need A > 0, lambda >= 0");
  if (n < 1) throw InvalidParameterError("n must be positive");
  return std::pow(a_const * lambda, double(n));
}

double lambda_from_s(double s) {
  if (!(s > 0.0) || s > 1.0) throw InvalidParameterError("s must lie in (0,1]");
  return (1.0 - s) / s;
}

double s_from_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw InvalidParameterError("lambda must be non-negative");
  return 1.0 / (1.0 + lambda);
}

double lambda_cr_estimate(int n_bits) {
  if (n_bits < 3) throw InvalidParameterError("n_bits must be at least 3");
  return 1.0 / std::log(double(n_bits));
}

std::string gap_estimate_to_json(const GapEstimate& g) {
  nlohmann::ordered_json j;
  j["lambda_star"] = g.lambda_star;
  j["delta_min"] = g.delta_min;
  j["v_alpha"] = g.v_alpha;
  j["n0"] = g.n0;
  j["a_const"] = g.a_const;
  return j.dump(2) + "\n";
}

}  // namespace gaplab
