#include "gaplab/perturbation.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "gaplab/detail/rational.hpp"
#include "gaplab/detail/rs_series.hpp"
#include "gaplab/errors.hpp"

namespace gaplab {
namespace {

using ordered_json = nlohmann::ordered_json;

inline long long clause_value(int ones) {
  const long long s = ones - 1;
  return s * s;
}

// Mutable neighborhood of a center assignment: tracks per-clause one-counts so
// single-bit flips update the total cost in O(B_i).
struct LocalContext {
  const Instance& inst;
  std::vector<std::vector<int>> clauses_of;  // 1-based bit -> clause indices
  std::vector<int> ones;                     // per clause under `cur`
  Assignment cur;
  long long cost_now = 0;

  LocalContext(const Instance& in, const Assignment& sigma)
      : inst(in), clauses_of(in.n_bits + 1), ones(in.clauses.size(), 0), cur(sigma) {
    for (size_t c = 0; c < in.clauses.size(); ++c) {
      for (int b : in.clauses[c].bits) clauses_of[b].push_back(int(c));
      ones[c] = in.clauses[c].ones_under(sigma);
      cost_now += clause_value(ones[c]);
    }
  }

  void flip(int bit) {
    const int delta = cur.get(bit) ? -1 : +1;
    for (int c : clauses_of[bit]) {
      cost_now -= clause_value(ones[c]);
      ones[c] += delta;
      cost_now += clause_value(ones[c]);
    }
    cur.flip(bit);
  }
};

// Coupling-graph adjacency (i ~ j iff some clause contains both), restricted
// to constrained bits; sorted unique neighbor lists.
std::vector<std::vector<int>> coupling_adjacency(const Instance& inst) {
  std::vector<std::vector<int>> adj(inst.n_bits + 1);
  for (const Clause& c : inst.clauses) {
    adj[c.bits[0]].push_back(c.bits[1]);
    adj[c.bits[0]].push_back(c.bits[2]);
    adj[c.bits[1]].push_back(c.bits[0]);
    adj[c.bits[1]].push_back(c.bits[2]);
    adj[c.bits[2]].push_back(c.bits[0]);
    adj[c.bits[2]].push_back(c.bits[1]);
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

// Enumerates every connected subset of the coupling graph with size <= max_size
// exactly once (each subset is discovered from its minimum vertex; extension
// candidates are restricted to exclusive new neighbors, so no subset repeats).
// The callback sees the LocalContext with the subset flipped and the subset
// contents; returning true aborts the walk.
class ConnectedSubsets {
 public:
  ConnectedSubsets(LocalContext& ctx, const std::vector<std::vector<int>>& adj)
      : ctx_(ctx), adj_(adj), blocked_(adj.size(), false) {}

  template <typename Cb>
  bool visit(const std::vector<int>& vertices, int max_size, Cb&& cb) {
    if (max_size < 1) return false;
    for (int v : vertices) {
      blocked_[v] = true;
      marks_.push_back(v);
      subset_.push_back(v);
      ctx_.flip(v);
      bool hit = cb(subset_);
      if (!hit && max_size > 1) {
        std::vector<int> ext;
        for (int u : adj_[v])
          if (u > v && !blocked_[u]) {
            blocked_[u] = true;
            marks_.push_back(u);
            ext.push_back(u);
          }
        hit = extend(ext, v, max_size, cb);
      }
      ctx_.flip(v);
      subset_.pop_back();
      for (int u : marks_) blocked_[u] = false;
      marks_.clear();
      if (hit) return true;
    }
    return false;
  }

 private:
  template <typename Cb>
  bool extend(std::vector<int> ext, int root, int max_size, Cb&& cb) {
    while (!ext.empty()) {
      const int w = ext.back();
      ext.pop_back();
      subset_.push_back(w);
      ctx_.flip(w);
      bool hit = cb(subset_);
      if (!hit && int(subset_.size()) < max_size) {
        std::vector<int> ext2 = ext;
        size_t first_new = marks_.size();
        for (int u : adj_[w])
          if (u > root && !blocked_[u]) {
            blocked_[u] = true;
            marks_.push_back(u);
            ext2.push_back(u);
          }
        hit = extend(std::move(ext2), root, max_size, cb);
        while (marks_.size() > first_new) {
          blocked_[marks_.back()] = false;
          marks_.pop_back();
        }
      }
      ctx_.flip(w);
      subset_.pop_back();
      if (hit) return true;
      // w stays blocked: subsets through w in later branches would repeat.
    }
    return false;
  }

  LocalContext& ctx_;
  const std::vector<std::vector<int>>& adj_;
  std::vector<bool> blocked_;
  std::vector<int> marks_;
  std::vector<int> subset_;
};

// Plain bounded-depth enumeration of flip subsets (ascending indices) for
// centers where the connected-subset shortcut is not sound (cost > 0: equal
// cost can arise from cancelling far-apart groups of flips).
bool dfs_equal_cost(LocalContext& ctx, const std::vector<int>& vertices, size_t start, int depth_left,
                    long long target, Assignment& out) {
  for (size_t i = start; i < vertices.size(); ++i) {
    ctx.flip(vertices[i]);
    if (ctx.cost_now == target) {
      out = ctx.cur;
      ctx.flip(vertices[i]);
      return true;
    }
    if (depth_left > 1 && dfs_equal_cost(ctx, vertices, i + 1, depth_left - 1, target, out)) {
      ctx.flip(vertices[i]);
      return true;
    }
    ctx.flip(vertices[i]);
  }
  return false;
}

std::vector<int> constrained_bits(const Instance& inst) {
  std::vector<char> in_clause(inst.n_bits + 1, 0);
  for (const Clause& c : inst.clauses)
    for (int b : c.bits) in_clause[b] = 1;
  std::vector<int> out;
  for (int b = 1; b <= inst.n_bits; ++b)
    if (in_clause[b]) out.push_back(b);
  return out;
}

// Restricted-subcube diagonal for a cluster: costs of the center with every
// subset of the cluster's bits flipped, indexed by submask.
std::vector<long long> cluster_diagonal(LocalContext& ctx, const std::vector<int>& bits) {
  const int b = int(bits.size());
  std::vector<long long> diag(size_t(1) << b);
  for (unsigned j = 0; j < diag.size(); ++j) {
    for (int t = 0; t < b; ++t)
      if (j & (1u << t)) ctx.flip(bits[t]);
    diag[j] = ctx.cost_now;
    for (int t = 0; t < b; ++t)
      if (j & (1u << t)) ctx.flip(bits[t]);
  }
  return diag;
}

// Even-order coefficients F^(m), m = 1..orders, of the restricted cluster
// problem; exact rationals, falling back to doubles if 128-bit intermediates
// overflow. Odd orders vanish by the bipartite structure of the subcube.
std::vector<double> cluster_series(const std::vector<long long>& diag, int n_sub, int orders) {
  try {
    auto e = detail::rs_energy_series<detail::Rational>(diag, n_sub, 2 * orders);
    std::vector<double> f(orders);
    for (int m = 1; m <= orders; ++m) f[m - 1] = e[2 * m].to_double();
    return f;
  } catch (const detail::RationalOverflow&) {
    auto e = detail::rs_energy_series<double>(diag, n_sub, 2 * orders);
    std::vector<double> f(orders);
    for (int m = 1; m <= orders; ++m) f[m - 1] = e[2 * m];
    return f;
  }
}

}  // namespace

namespace detail {

std::optional<Assignment> find_equal_energy_within(const Instance& inst, const Assignment& sigma,
                                                   int radius) {
  if (sigma.n_bits() != inst.n_bits)
    throw InvalidParameterError("assignment length does not match instance");
  if (radius < 1) throw InvalidParameterError("isolation radius must be positive");

  const std::vector<int> verts = constrained_bits(inst);
  LocalContext ctx(inst, sigma);
  const long long base = ctx.cost_now;

  if (base == 0) {
    // From an exact solution every flip set decomposes over coupling-graph
    // components with independent, non-negative cost increments, so an equal
    // cost twin within the radius exists iff some single connected subset
    // keeps the cost at zero.
    const auto adj = coupling_adjacency(inst);
    ConnectedSubsets walker(ctx, adj);
    std::optional<Assignment> found;
    walker.visit(verts, radius, [&](const std::vector<int>&) {
      if (ctx.cost_now == 0) {
        found = ctx.cur;
        return true;
      }
      return false;
    });
    return found;
  }

  Assignment out(inst.n_bits);
  if (dfs_equal_cost(ctx, verts, 0, radius, base, out)) return out;
  return std::nullopt;
}

std::vector<double> subset_cumulant(const Instance& inst, const Assignment& sigma,
                                    const std::vector<int>& bits, int orders) {
  if (orders < 1 || orders > 3) throw InvalidParameterError("cumulant orders must be in [1,3]");
  std::vector<int> sorted = bits;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidParameterError("cumulant subset has repeated bits");
  for (int b : sorted)
    if (b < 1 || b > inst.n_bits) throw InvalidParameterError("cumulant bit out of range");
  const int nb = int(sorted.size());
  if (nb == 0 || nb > 10) throw InvalidParameterError("cumulant subset size out of range");

  LocalContext ctx(inst, sigma);
  const unsigned full = (1u << nb) - 1;

  // F for every nonempty submask, then Moebius inversion by ascending
  // popcount. Exact rationals throughout unless any submask overflows, in
  // which case the whole table is redone in doubles so the subtractions stay
  // internally consistent.
  auto assemble = [&](auto zero, auto series_of) {
    using V = decltype(zero());
    std::vector<V> w(full + 1, zero());
    std::vector<unsigned> by_pop;
    for (unsigned s = 1; s <= full; ++s) by_pop.push_back(s);
    std::sort(by_pop.begin(), by_pop.end(), [](unsigned a, unsigned b) {
      const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
      return pa != pb ? pa < pb : a < b;
    });
    for (unsigned s : by_pop) {
      std::vector<int> sub;
      for (int t = 0; t < nb; ++t)
        if (s & (1u << t)) sub.push_back(sorted[t]);
      auto diag = cluster_diagonal(ctx, sub);
      V f = series_of(diag, int(sub.size()));
      for (unsigned p = (s - 1) & s; p; p = (p - 1) & s) {
        for (int m = 0; m < orders; ++m) f[m] = f[m] - w[p][m];
      }
      w[s] = f;
    }
    return w[full];
  };

  try {
    auto wr = assemble([] { return std::vector<Rational>(); },
                       [&](const std::vector<long long>& diag, int ns) {
                         auto e = rs_energy_series<Rational>(diag, ns, 2 * orders);
                         std::vector<Rational> f(orders);
                         for (int m = 1; m <= orders; ++m) f[m - 1] = e[2 * m];
                         return f;
                       });
    std::vector<double> out(orders);
    for (int m = 0; m < orders; ++m) out[m] = wr[m].to_double();
    return out;
  } catch (const RationalOverflow&) {
    return assemble([] { return std::vector<double>(); },
                    [&](const std::vector<long long>& diag, int ns) {
                      auto e = rs_energy_series<double>(diag, ns, 2 * orders);
                      std::vector<double> f(orders);
                      for (int m = 1; m <= orders; ++m) f[m - 1] = e[2 * m];
                      return f;
                    });
  }
}

}  // namespace detail

SeriesCoefficients series_coefficients(const Instance& inst, const Assignment& sigma,
                                       int max_order) {
  if (max_order < 1 || max_order > 3)
    throw InvalidParameterError("max_order must be in [1,3]");
  if (sigma.n_bits() != inst.n_bits)
    throw InvalidParameterError("assignment length does not match instance");

  if (auto twin = detail::find_equal_energy_within(inst, sigma, 2 * max_order))
    throw DegenerateNeighborhoodError("center is not isolated at this order", twin->to_string());

  LocalContext ctx(inst, sigma);
  const long long base = ctx.cost_now;
  const auto adj = coupling_adjacency(inst);
  const auto verts = constrained_bits(inst);

  // Collect the connected clusters once, then evaluate in ascending size so
  // every (connected) proper subset is already available for the Moebius
  // subtraction; disconnected subsets contribute exactly zero and are skipped.
  std::vector<std::vector<int>> clusters;
  {
    ConnectedSubsets walker(ctx, adj);
    walker.visit(verts, max_order, [&](const std::vector<int>& s) {
      std::vector<int> sorted = s;
      std::sort(sorted.begin(), sorted.end());
      clusters.push_back(std::move(sorted));
      return false;
    });
  }
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });

  std::map<std::vector<int>, std::vector<double>> w;
  std::vector<double> total(max_order, 0.0);
  for (const auto& S : clusters) {
    auto diag = cluster_diagonal(ctx, S);
    std::vector<double> f = cluster_series(diag, int(S.size()), max_order);
    // Subtract the cumulants of proper nonempty subsets (connected ones only;
    // the rest vanish identically).
    const int b = int(S.size());
    for (unsigned sub = 1; sub + 1 < (1u << b); ++sub) {
      std::vector<int> key;
      for (int t = 0; t < b; ++t)
        if (sub & (1u << t)) key.push_back(S[t]);
      auto it = w.find(key);
      if (it == w.end()) continue;
      for (int m = 0; m < max_order; ++m) f[m] -= it->second[m];
    }
    for (int m = 0; m < max_order; ++m) total[m] += f[m];
    w.emplace(S, std::move(f));
  }

  SeriesCoefficients out;
  out.center = sigma;
  out.base_energy = base;
  out.max_order = max_order;
  out.f = std::move(total);
  out.reduced = true;
  return out;
}

SplittingSeries splitting(const Instance& inst, const SolutionPair& pair, int max_order) {
  if (max_order < 2 || max_order > 3)
    throw InvalidParameterError("splitting max_order must be in [2,3]");
  const int dist = hamming_distance(pair.sigma1, pair.sigma2);
  SplittingSeries out;
  out.pair = pair;
  out.pair.distance = dist;
  out.max_order = max_order;
  if (dist == 0) {
    out.d.assign(max_order, 0.0);
    return out;
  }
  if (dist <= 2 * max_order)
    throw PairTooCloseError("pair distance " + std::to_string(dist) +
                            " must exceed twice max_order (" + std::to_string(2 * max_order) +
                            ") for uncontaminated per-level series");
  SeriesCoefficients s1 = series_coefficients(inst, pair.sigma1, max_order);
  SeriesCoefficients s2 = series_coefficients(inst, pair.sigma2, max_order);
  out.d.resize(max_order);
  for (int m = 0; m < max_order; ++m) out.d[m] = s1.f[m] - s2.f[m];
  return out;
}

std::string series_to_json(const SeriesCoefficients& s) {
  ordered_json j;
  j["center"] = s.center.to_string();
  j["base_energy"] = s.base_energy;
  j["max_order"] = s.max_order;
  j["f_coeffs"] = s.f;
  j["reduced"] = s.reduced;
  j["sign_convention"] = "rs-standard";
  j["hopping"] = "-lambda";
  return j.dump(2) + "\n";
}

std::string splitting_to_json(const SplittingSeries& s) {
  ordered_json j;
  j["sigma1"] = s.pair.sigma1.to_string();
  j["sigma2"] = s.pair.sigma2.to_string();
  j["distance"] = s.pair.distance;
  j["max_order"] = s.max_order;
  j["d_coeffs"] = s.d;
  j["sign_convention"] = "rs-standard";
  j["hopping"] = "-lambda";
  return j.dump(2) + "\n";
}

}  // namespace gaplab
