#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gaplab/instance.hpp"

namespace gaplab {

struct SolutionSet {
  // One representative per free-bit orbit (free bits held at 0), in the
  // deterministic order the search emits them.
  std::vector<Assignment> solutions;
  bool complete = false;  // false iff the node budget ran out
  std::uint64_t nodes_explored = 0;
  Assignment free_mask;   // '1' exactly where the bit occurs in no clause
};

// Depth-first branch-and-propagate enumeration of all satisfying
// assignments modulo free bits. Branching picks the unassigned bit with
// the largest clause count (ties to the smallest index), value 0 first.
SolutionSet enumerate_solutions(const Instance& inst, std::uint64_t node_budget);

int hamming_distance(const Assignment& a, const Assignment& b);

struct SolutionPair {
  Assignment sigma1, sigma2;
  int distance = 0;
};

// Maximum-distance pair at distance >= min_distance, ties broken by
// lexicographic order of (sigma1, sigma2); none if no pair qualifies.
std::optional<SolutionPair> select_pair(const SolutionSet& set, int min_distance);

// Every clause over {1..n} satisfied by sat_by (exactly one bit set) and not
// by viol_by, in lexicographic order. Both assignments must solve inst.
std::vector<Clause> distinguishing_clauses(const Instance& inst, const Assignment& sat_by,
                                           const Assignment& viol_by);

// JSON: {"complete": bool, "solutions": ["0110...", ...],
//        "free_mask": "0001...", "nodes_explored": n}
std::string solution_set_to_json(const SolutionSet& set);
SolutionSet solution_set_from_json(const std::string& text);

}  // namespace gaplab
