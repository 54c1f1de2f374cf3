#pragma once

// Engineered two-solution instances used by the harness tests and the
// acceptance gate. Each member hides one tunneling pair of adjustable
// Hamming distance inside a fixed-size instance:
//
//   - n_pairs "domino" bit pairs (2k-1, 2k); solution A raises the even
//     bits, solution B the odd ones, so the pair distance is 2 * n_pairs.
//   - three agree-0 bits zA, zB, zC and one agree-1 bit w. The anchor
//     clauses (zA,zB,w), (zB,zC,w), (zA,zC,w) pin all four: raising any z
//     breaks two anchors, dropping w breaks all three.
//   - pair 2 hangs off pair 1 through (1,4,zC), (2,3,zC); pairs >= 3 chain
//     through tau-symmetric couplings, and (1,6,zC), (2,5,zC) tie the chain
//     back to pair 1. Every cross-pair clause keeps a z in its third slot,
//     so both solution patterns satisfy it exactly-once.
//   - singleton bits (one clause (s, zX, zY), raised in both solutions) pad
//     the instance to n_total without touching the tunneling paths.
//
// Duplicated clauses are legal and deliberate: repeating a pair or coupling
// clause stiffens the intermediate states of the tunneling paths, which
// scales the path-sum coefficient down without moving the solution set.

#include <cstdint>
#include <vector>

#include "gaplab/instance.hpp"
#include "gaplab/rng.hpp"
#include "gaplab/solver.hpp"

namespace family {

struct Member {
  gaplab::Instance instance;
  gaplab::SolutionPair pair;  // sigma1 lex-smaller, distance = 2 * n_pairs
};

inline Member member(int n_total, int n_pairs, const std::vector<int>& pair_dups,
                     const std::vector<int>& coup_dups, std::uint64_t spectator_seed = 0) {
  const int nd = 2 * n_pairs;
  const int zA = nd + 1, zB = nd + 2, zC = nd + 3, w = nd + 4;
  gaplab::Instance inst;
  inst.n_bits = n_total;
  auto add = [&inst](int a, int b, int c, int reps = 1) {
    for (int r = 0; r < reps; ++r) inst.clauses.emplace_back(a, b, c);
  };
  for (int k = 1; k <= n_pairs; ++k) {
    const int reps = 1 + (k - 1 < (int)pair_dups.size() ? pair_dups[k - 1] : 0);
    add(2 * k - 1, 2 * k, k % 2 ? zA : zB, reps);
  }
  add(1, 4, zC);
  add(2, 3, zC);
  if (n_pairs >= 3) {
    add(1, 6, zC);
    add(2, 5, zC);
  }
  for (int k = 3; k < n_pairs; ++k) {
    const int l = k + 1;
    const int reps = 1 + (k - 3 < (int)coup_dups.size() ? coup_dups[k - 3] : 0);
    add(2 * k - 1, 2 * l, zC, reps);
    add(2 * k, 2 * l - 1, zC, reps);
  }
  add(zA, zB, w);
  add(zB, zC, w);
  add(zA, zC, w);
  const int zp[3][2] = {{zA, zB}, {zB, zC}, {zA, zC}};
  gaplab::SplitRng rng(spectator_seed);
  for (int s = nd + 5; s <= n_total; ++s) {
    const int pick = spectator_seed == 0 ? (s - nd - 5) % 3 : (int)rng.next_below(3);
    add(s, zp[pick][0], zp[pick][1]);
  }

  Member m;
  m.instance = inst;
  gaplab::Assignment odd(n_total), even(n_total);
  for (int k = 1; k <= n_pairs; ++k) {
    odd.set(2 * k - 1, true);
    even.set(2 * k, true);
  }
  for (gaplab::Assignment* a : {&odd, &even}) {
    a->set(w, true);
    for (int s = nd + 5; s <= n_total; ++s) a->set(s, true);
  }
  m.pair.sigma1 = even;  // "01" heads the bitstring, so even is lex-smaller
  m.pair.sigma2 = odd;
  m.pair.distance = nd;
  return m;
}

// The four-rung gap-law ladder: distances 4, 6, 8, 10 inside N = 14, with
// duplication chosen so the path-sum coefficients stay of one magnitude
// across rungs.
inline std::vector<Member> gap_ladder() {
  return {
      member(14, 2, {1, 0}, {}),
      member(14, 3, {}, {}),
      member(14, 4, {}, {2}),
      member(14, 5, {}, {2, 2}),
  };
}

}  // namespace family
