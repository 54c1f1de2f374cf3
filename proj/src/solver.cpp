#include "gaplab/solver.hpp"

#include <algorithm>
#include <bit>

#include <json.hpp>

namespace gaplab {

using ordered_json = nlohmann::ordered_json;

namespace {

// One in-flight enumeration. Clause state is tracked as (#ones, #zeros)
// over assigned bits; the exactly-one semantics give three forcing rules:
//   two 1s            -> conflict
//   one 1             -> every other unassigned bit goes to 0
//   zero 1s, two 0s   -> the remaining bit goes to 1
//   zero 1s, three 0s -> conflict
struct Searcher {
  const Instance& inst;
  std::uint64_t budget;

  std::vector<std::vector<int>> clauses_of;  // bit -> clause ids
  std::vector<signed char> val;              // -1 unassigned
  std::vector<int> ones, zeros;              // per clause
  std::vector<int> trail;                    // assignment order, for undo
  std::vector<int> order;                    // non-free bits, branch priority
  std::vector<std::pair<int, signed char>> queue;

  SolutionSet out;
  std::uint64_t nodes = 0;
  bool aborted = false;

  explicit Searcher(const Instance& instance, std::uint64_t node_budget)
      : inst(instance), budget(node_budget) {
    const std::size_t n = std::size_t(inst.n_bits);
    clauses_of.assign(n + 1, {});
    val.assign(n + 1, -1);
    ones.assign(inst.clauses.size(), 0);
    zeros.assign(inst.clauses.size(), 0);
    std::vector<int> degree(n + 1, 0);
    for (std::size_t c = 0; c < inst.clauses.size(); ++c)
      for (int t = 0; t < 3; ++t) {
        const int b = inst.clauses[c].bits[std::size_t(t)];
        clauses_of[std::size_t(b)].push_back(int(c));
        ++degree[std::size_t(b)];
      }
    for (int b = 1; b <= inst.n_bits; ++b)
      if (degree[std::size_t(b)] > 0) order.push_back(b);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return degree[std::size_t(a)] > degree[std::size_t(b)];
    });
    out.free_mask = Assignment(inst.n_bits);
    for (int b = 1; b <= inst.n_bits; ++b)
      if (degree[std::size_t(b)] == 0) out.free_mask.set(b, true);
  }

  // Sets bit = v and runs propagation; false on conflict. All assignments,
  // forced or chosen, go through here and land on the trail.
  bool assign(int bit, signed char v) {
    queue.clear();
    queue.emplace_back(bit, v);
    while (!queue.empty()) {
      auto [b, want] = queue.back();
      queue.pop_back();
      if (val[std::size_t(b)] != -1) {
        if (val[std::size_t(b)] != want) return false;
        continue;
      }
      val[std::size_t(b)] = want;
      trail.push_back(b);
      // Two passes: undo_to() decrements every clause of b, so all the
      // increments must land before a conflict can bail out of here.
      for (int ci : clauses_of[std::size_t(b)]) {
        if (want) ++ones[std::size_t(ci)]; else ++zeros[std::size_t(ci)];
      }
      for (int ci : clauses_of[std::size_t(b)]) {
        const Clause& c = inst.clauses[std::size_t(ci)];
        const int o = ones[std::size_t(ci)], z = zeros[std::size_t(ci)];
        if (o >= 2 || z == 3) return false;
        if (o == 1) {
          for (int t = 0; t < 3; ++t) {
            const int u = c.bits[std::size_t(t)];
            if (val[std::size_t(u)] == -1) queue.emplace_back(u, 0);
          }
        } else if (z == 2) {  // o == 0 here
          for (int t = 0; t < 3; ++t) {
            const int u = c.bits[std::size_t(t)];
            if (val[std::size_t(u)] == -1) queue.emplace_back(u, 1);
          }
        }
      }
    }
    return true;
  }

  void undo_to(std::size_t mark) {
    while (trail.size() > mark) {
      const int b = trail.back();
      trail.pop_back();
      for (int ci : clauses_of[std::size_t(b)]) {
        if (val[std::size_t(b)]) --ones[std::size_t(ci)]; else --zeros[std::size_t(ci)];
      }
      val[std::size_t(b)] = -1;
    }
  }

  void record() {
    Assignment a(inst.n_bits);
    for (int b = 1; b <= inst.n_bits; ++b)
      if (val[std::size_t(b)] == 1) a.set(b, true);
    out.solutions.push_back(std::move(a));
  }

  void search() {
    if (aborted) return;
    if (++nodes > budget) {
      aborted = true;
      return;
    }
    int branch = 0;
    for (int b : order)
      if (val[std::size_t(b)] == -1) {
        branch = b;
        break;
      }
    if (branch == 0) {
      record();
      return;
    }
    for (int v = 0; v <= 1; ++v) {
      const std::size_t mark = trail.size();
      if (assign(branch, static_cast<signed char>(v))) search();
      undo_to(mark);
      if (aborted) return;
    }
  }

  SolutionSet run() {
    if (inst.clauses.empty()) {
      // no constraints: the all-zero representative, every bit free
      ++nodes;
      record();
    } else {
      search();
    }
    out.complete = !aborted;
    out.nodes_explored = nodes;
    return std::move(out);
  }
};

}  // namespace

SolutionSet enumerate_solutions(const Instance& inst, std::uint64_t node_budget) {
  if (node_budget == 0) throw InvalidParameterError("node budget must be positive");
  Searcher s(inst, node_budget);
  return s.run();
}

int hamming_distance(const Assignment& a, const Assignment& b) {
  if (a.n_bits() != b.n_bits()) throw InvalidParameterError("hamming distance needs equal sizes");
  int d = 0;
  for (std::size_t k = 0; k < a.words().size(); ++k)
    d += std::popcount(a.words()[k] ^ b.words()[k]);
  return d;
}

std::optional<SolutionPair> select_pair(const SolutionSet& set, int min_distance) {
  if (min_distance < 1) throw InvalidParameterError("min_distance must be >= 1");
  const auto& sols = set.solutions;
  int best = 0;
  std::optional<SolutionPair> out;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    for (std::size_t j = i + 1; j < sols.size(); ++j) {
      const int d = hamming_distance(sols[i], sols[j]);
      if (d < min_distance || d < best) continue;
      const Assignment& lo = sols[i].lex_less(sols[j]) ? sols[i] : sols[j];
      const Assignment& hi = sols[i].lex_less(sols[j]) ? sols[j] : sols[i];
      if (d > best) {
        best = d;
        out = SolutionPair{lo, hi, d};
      } else {  // d == best: keep the lexicographically smallest (sigma1, sigma2)
        if (lo.lex_less(out->sigma1) ||
            (lo == out->sigma1 && hi.lex_less(out->sigma2)))
          out = SolutionPair{lo, hi, d};
      }
    }
  }
  return out;
}

std::vector<Clause> distinguishing_clauses(const Instance& inst, const Assignment& sat_by,
                                           const Assignment& viol_by) {
  if (cost(inst, sat_by) != 0 || cost(inst, viol_by) != 0)
    throw InvalidParameterError("distinguishing_clauses expects two solutions of the instance");
  std::vector<Clause> out;
  const int n = inst.n_bits;
  for (int i = 1; i <= n; ++i) {
    const int ai = sat_by.get(i), bi = viol_by.get(i);
    for (int j = i + 1; j <= n; ++j) {
      const int aij = ai + sat_by.get(j), bij = bi + viol_by.get(j);
      if (aij > 1) continue;  // sat_by can never have exactly one 1 below
      for (int k = j + 1; k <= n; ++k) {
        if (aij + sat_by.get(k) != 1) continue;
        if (bij + viol_by.get(k) == 1) continue;
        out.emplace_back(i, j, k);
      }
    }
  }
  return out;
}

std::string solution_set_to_json(const SolutionSet& set) {
  ordered_json doc;
  doc["complete"] = set.complete;
  doc["solutions"] = ordered_json::array();
  for (const Assignment& a : set.solutions) doc["solutions"].push_back(a.to_string());
  doc["free_mask"] = set.free_mask.to_string();
  doc["nodes_explored"] = set.nodes_explored;
  return doc.dump(2) + "\n";
}

SolutionSet solution_set_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("solution set json: ") + e.what());
  }
  SolutionSet set;
  if (!doc.is_object() || !doc.contains("complete") || !doc.contains("solutions") ||
      !doc.contains("free_mask"))
    throw ParseError("solution set json needs keys complete, solutions, free_mask");
  set.complete = doc["complete"].get<bool>();
  set.free_mask = Assignment::from_string(doc["free_mask"].get<std::string>());
  for (const auto& s : doc["solutions"]) {
    set.solutions.push_back(Assignment::from_string(s.get<std::string>()));
    if (set.solutions.back().n_bits() != set.free_mask.n_bits())
      throw ParseError("solution length mismatch");
  }
  if (doc.contains("nodes_explored")) set.nodes_explored = doc["nodes_explored"].get<std::uint64_t>();
  return set;
}

}  // namespace gaplab
