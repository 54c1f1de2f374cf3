#pragma once

#include <cstdint>
#include <string>

#include "gaplab/instance.hpp"
#include "gaplab/solver.hpp"

namespace gaplab {

// Leading-order tunneling matrix element between two assignments at Hamming
// distance n: |V12(lambda)| = |coefficient| * lambda^n, where coefficient is
// the sum over all n! flip orders of the product over the n-1 strictly
// intermediate assignments of (-1/E_P). All path products share the sign
// (-1)^(n-1); with hopping -lambda the signed matrix element is
// (-1)^n * coefficient * lambda^n.
struct TunnelingAmplitude {
  int order = 0;                // n, the pair distance
  double coefficient = 0.0;     // exact (DP) or estimated (MC)
  std::string method;           // "exact-dp" | "monte-carlo"
  double stderr_ = 0.0;         // monte-carlo only
  long long sample_count = 0;   // monte-carlo: accepted paths
  long long rejected = 0;       // monte-carlo: resonant paths discarded
  bool resonance_warning = false;  // monte-carlo: >1% of paths resonant

  double amplitude(double lambda) const;  // |coefficient| * lambda^order
};

// Exact subset-sum dynamic programming over the 2^n flip masks; n <= 24.
// sigma1 must have cost 0 (the expansion is anchored at a ground solution).
// Throws ResonantIntermediateError if a proper intermediate has E_P = 0 and
// SizeLimitError (pointing at the Monte Carlo estimator) for n > 24.
TunnelingAmplitude tunneling_dp(const Instance& inst, const SolutionPair& pair);

// Unbiased estimator over uniformly random flip orders. Resonant paths are
// rejected and counted; if they exceed 1% of draws the resonance_warning
// flag is set. Deterministic per seed.
TunnelingAmplitude tunneling_mc(const Instance& inst, const SolutionPair& pair,
                                long long samples, std::uint64_t seed);

std::string tunneling_to_json(const TunnelingAmplitude& t);

}  // namespace gaplab
