#include "gaplab/tunneling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "gaplab/errors.hpp"
#include "gaplab/rng.hpp"

namespace gaplab {
namespace {

using ordered_json = nlohmann::ordered_json;

inline long long clause_value(int ones) {
  const long long s = ones - 1;
  return s * s;
}

struct FlipWalker {
  const Instance& inst;
  std::vector<std::vector<int>> clauses_of;
  std::vector<int> ones;
  long long cost_now = 0;

  FlipWalker(const Instance& in, const Assignment& sigma)
      : inst(in), clauses_of(in.n_bits + 1), ones(in.clauses.size(), 0) {
    for (size_t c = 0; c < in.clauses.size(); ++c) {
      for (int b : in.clauses[c].bits) clauses_of[b].push_back(int(c));
      ones[c] = in.clauses[c].ones_under(sigma);
      cost_now += clause_value(ones[c]);
    }
    state = sigma;
  }

  Assignment state{1};

  void flip(int bit) {
    const int delta = state.get(bit) ? -1 : +1;
    for (int c : clauses_of[bit]) {
      cost_now -= clause_value(ones[c]);
      ones[c] += delta;
      cost_now += clause_value(ones[c]);
    }
    state.flip(bit);
  }
};

std::vector<int> differing_bits(const SolutionPair& pair) {
  if (pair.sigma1.n_bits() != pair.sigma2.n_bits())
    throw InvalidParameterError("pair assignments have different lengths");
  std::vector<int> d;
  for (int b = 1; b <= pair.sigma1.n_bits(); ++b)
    if (pair.sigma1.get(b) != pair.sigma2.get(b)) d.push_back(b);
  return d;
}

void require_ground_anchor(const Instance& inst, const Assignment& sigma1) {
  if (cost(inst, sigma1) != 0)
    throw InvalidParameterError("tunneling expansion must be anchored at a cost-0 assignment");
}

}  // namespace

double TunnelingAmplitude::amplitude(double lambda) const {
  return std::abs(coefficient) * std::pow(lambda, order);
}

TunnelingAmplitude tunneling_dp(const Instance& inst, const SolutionPair& pair) {
  require_ground_anchor(inst, pair.sigma1);
  const std::vector<int> d = differing_bits(pair);
  const int n = int(d.size());
  if (n == 0) throw InvalidParameterError("pair distance is zero");
  if (n > 24)
    throw SizeLimitError("pair distance " + std::to_string(n) +
                         " exceeds the exact-DP limit of 24; use the Monte Carlo estimator");

  const size_t dim = size_t(1) << n;

  // Pass 1: intermediate energies for every flip mask, filled along a Gray
  // walk so each step is a single O(B_i) flip.
  std::vector<long long> energy(dim, 0);
  {
    FlipWalker walker(inst, pair.sigma1);
    energy[0] = walker.cost_now;  // = 0
    for (size_t i = 1; i < dim; ++i) {
      walker.flip(d[size_t(std::countr_zero(i))]);
      energy[i ^ (i >> 1)] = walker.cost_now;
    }
  }

  // Pass 2: G(0) = 1, G(S) = (-1/E(S)) * sum_{i in S} G(S \ {i}) for proper
  // nonempty S; ascending masks visit every subset before its supersets.
  const size_t full = dim - 1;
  std::vector<double> g(dim, 0.0);
  g[0] = 1.0;
  for (size_t s = 1; s < full; ++s) {
    if (energy[s] == 0) {
      Assignment offender = pair.sigma1;
      for (int t = 0; t < n; ++t)
        if (s & (size_t(1) << t)) offender.flip(d[size_t(t)]);
      throw ResonantIntermediateError("a proper intermediate assignment has zero cost",
                                      offender.to_string());
    }
    double acc = 0.0;
    for (size_t rem = s; rem;) {
      const size_t bit = rem & (~rem + 1);
      acc += g[s ^ bit];
      rem ^= bit;
    }
    g[s] = -acc / double(energy[s]);
  }

  double coeff = 0.0;
  if (n == 1) {
    coeff = 1.0;  // single path, no intermediates
  } else {
    for (size_t rem = full; rem;) {
      const size_t bit = rem & (~rem + 1);
      coeff += g[full ^ bit];
      rem ^= bit;
    }
  }

  TunnelingAmplitude out;
  out.order = n;
  out.coefficient = coeff;
  out.method = "exact-dp";
  return out;
}

TunnelingAmplitude tunneling_mc(const Instance& inst, const SolutionPair& pair,
                                long long samples, std::uint64_t seed) {
  require_ground_anchor(inst, pair.sigma1);
  if (samples < 1) throw InvalidParameterError("samples must be >= 1");
  std::vector<int> d = differing_bits(pair);
  const int n = int(d.size());
  if (n == 0) throw InvalidParameterError("pair distance is zero");

  SplitRng rng(seed);
  FlipWalker walker(inst, pair.sigma1);
  std::vector<int> order(d.begin(), d.end());

  // Path products all carry the sign (-1)^(n-1); magnitudes are accumulated
  // in log space so long paths neither underflow nor overflow.
  std::vector<double> logs;
  logs.reserve(size_t(samples));
  long long rejected = 0;

  for (long long s = 0; s < samples; ++s) {
    for (int i = n - 1; i > 0; --i) {
      const int j = int(rng.next_below(std::uint64_t(i) + 1));
      std::swap(order[size_t(i)], order[size_t(j)]);
    }
    double log_abs = 0.0;
    bool resonant = false;
    int flipped = 0;
    for (; flipped < n - 1; ++flipped) {
      walker.flip(order[size_t(flipped)]);
      if (walker.cost_now == 0) {
        resonant = true;
        ++flipped;
        break;
      }
      log_abs -= std::log(double(walker.cost_now));
    }
    for (int u = flipped - 1; u >= 0; --u) walker.flip(order[size_t(u)]);
    if (resonant)
      ++rejected;
    else
      logs.push_back(log_abs);
  }

  const long long accepted = static_cast<long long>(logs.size());
  TunnelingAmplitude out;
  out.order = n;
  out.method = "monte-carlo";
  out.sample_count = accepted;
  out.rejected = rejected;
  out.resonance_warning = rejected * 100 > samples;

  const double parity = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^(n-1)
  const double log_n_fact = std::lgamma(double(n) + 1.0);
  if (accepted == 0) {
    out.coefficient = 0.0;
    out.stderr_ = 0.0;
    return out;
  }

  const double peak = *std::max_element(logs.begin(), logs.end());
  double sum1 = 0.0, sum2 = 0.0;
  for (double l : logs) {
    const double r = std::exp(l - peak);
    sum1 += r;
    sum2 += r * r;
  }
  const double log_mean = peak + std::log(sum1 / double(accepted));
  out.coefficient = parity * std::exp(log_n_fact + log_mean);

  if (accepted >= 2) {
    const double log_e2 = 2.0 * peak + std::log(sum2 / double(accepted));
    const double ratio = 1.0 - std::exp(2.0 * log_mean - log_e2);
    if (ratio > 0.0) {
      const double log_s2 =
          log_e2 + std::log(double(accepted) / double(accepted - 1)) + std::log(ratio);
      out.stderr_ = std::exp(log_n_fact + 0.5 * log_s2 - 0.5 * std::log(double(accepted)));
    }
  }
  return out;
}

std::string tunneling_to_json(const TunnelingAmplitude& t) {
  ordered_json j;
  j["order"] = t.order;
  j["coefficient"] = t.coefficient;
  j["method"] = t.method;
  if (t.method == "monte-carlo") {
    j["stderr"] = t.stderr_;
    j["sample_count"] = t.sample_count;
    j["rejected"] = t.rejected;
    j["resonance_warning"] = t.resonance_warning;
  }
  j["sign_convention"] = "rs-standard";
  j["hopping"] = "-lambda";
  j["signed_model"] = "(-1)^order * coefficient * lambda^order";
  return j.dump(2) + "\n";
}

}  // namespace gaplab
