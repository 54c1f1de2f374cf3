#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gaplab/errors.hpp"
#include "gaplab/rng.hpp"

namespace gaplab {

// Assignment of n bits, 1-based indexing, packed into 64-bit words.
// to_string() writes bit 1 first, and lex_less() compares in that order.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int n_bits);
  static Assignment from_string(const std::string& bits);

  int n_bits() const { return n_; }
  bool get(int i) const { check(i); return (w_[(i - 1) >> 6] >> ((i - 1) & 63)) & 1u; }
  void set(int i, bool v) {
    check(i);
    const std::uint64_t m = 1ull << ((i - 1) & 63);
    if (v) w_[(i - 1) >> 6] |= m; else w_[(i - 1) >> 6] &= ~m;
  }
  void flip(int i) { check(i); w_[(i - 1) >> 6] ^= 1ull << ((i - 1) & 63); }

  std::string to_string() const;

  // Basis index used by the spectrum module: index bit (i-1) = x_i.
  std::uint64_t to_index() const;
  static Assignment from_index(std::uint64_t index, int n_bits);

  bool lex_less(const Assignment& other) const;  // bitstring order
  friend bool operator==(const Assignment&, const Assignment&) = default;

  const std::vector<std::uint64_t>& words() const { return w_; }

 private:
  void check(int i) const {
    if (i < 1 || i > n_) throw InvalidParameterError("bit index out of range");
  }
  int n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Clause (i, j, k): exactly one of the three bits should be 1. Stored
// strictly increasing; construction sorts and validates.
struct Clause {
  std::array<int, 3> bits{0, 0, 0};

  Clause() = default;
  Clause(int i, int j, int k);

  bool contains(int bit) const { return bits[0] == bit || bits[1] == bit || bits[2] == bit; }
  int ones_under(const Assignment& x) const {
    return int(x.get(bits[0])) + int(x.get(bits[1])) + int(x.get(bits[2]));
  }
  // (x_i + x_j + x_k - 1)^2, i.e. 0 when satisfied, 1 or 4 otherwise.
  long long value_under(const Assignment& x) const {
    const long long s = ones_under(x) - 1;
    return s * s;
  }
  friend bool operator==(const Clause&, const Clause&) = default;
};

struct Instance {
  int n_bits = 0;
  std::vector<Clause> clauses;  // order matters: equality is sequence equality
  friend bool operator==(const Instance&, const Instance&) = default;
};

// n_clauses clauses drawn independently; within a clause the three indices
// are distinct and uniform over all 3-subsets of {1..n_bits}. Duplicate
// clauses across draws are allowed. Deterministic for a fixed seed.
Instance generate_instance(int n_bits, int n_clauses, std::uint64_t seed);
Instance generate_instance(int n_bits, int n_clauses, SplitRng& rng);

// Sum of clause values; 0 iff x satisfies every clause exactly-once.
long long cost(const Instance& inst, const Assignment& x);

// Diagonal coefficients: cost(x) = constant - 1/2 sum_i B_i s_i
// + 1/4 sum_{i != j} J_ij s_i s_j with s_i = 1 - 2 x_i.
struct IsingCoefficients {
  long long constant = 0;            // = number of clauses
  std::vector<long long> b;          // b[i], 1-based; b[0] unused
  std::vector<std::array<long long, 3>> couplings;  // {i, j, J_ij}, i < j, J > 0, sorted

  long long b_of(int i) const { return b.at(std::size_t(i)); }
  long long j_of(int i, int j) const;
  long long energy(const Assignment& x) const;  // evaluates the form above
};
IsingCoefficients ising_coefficients(const Instance& inst);

// New instance with the clause appended (input left untouched).
Instance add_clause(const Instance& inst, const Clause& c);

// Ascending indices of bits that occur in no clause.
std::vector<int> free_bits(const Instance& inst);

// Instance with free bits dropped and the rest renumbered 1..n'.
// kept_bits[t] is the original index of reduced bit t+1.
struct ReducedInstance {
  Instance instance;
  std::vector<int> kept_bits;
};
ReducedInstance strip_free_bits(const Instance& inst);

// JSON form: {"n": n, "clauses": [[i,j,k], ...]}. The parser rejects
// out-of-range and repeated-within-clause indices; round-trip is exact.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

}  // namespace gaplab
