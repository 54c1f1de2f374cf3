#include "gaplab/instance.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include <json.hpp>

namespace gaplab {

using ordered_json = nlohmann::ordered_json;

Assignment::Assignment(int n_bits) {
  if (n_bits < 0) throw InvalidParameterError("assignment size must be nonnegative");
  n_ = n_bits;
  w_.assign(std::size_t(n_bits + 63) / 64, 0);
}

Assignment Assignment::from_string(const std::string& bits) {
  Assignment a(int(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') a.set(int(i) + 1, true);
    else if (bits[i] != '0') throw ParseError("assignment string must be over {0,1}");
  }
  return a;
}

std::string Assignment::to_string() const {
  std::string s(std::size_t(n_), '0');
  for (int i = 1; i <= n_; ++i)
    if (get(i)) s[std::size_t(i - 1)] = '1';
  return s;
}

std::uint64_t Assignment::to_index() const {
  if (n_ > 63) throw SizeLimitError("basis index only defined up to 63 bits");
  return w_.empty() ? 0 : w_[0];
}

Assignment Assignment::from_index(std::uint64_t index, int n_bits) {
  if (n_bits < 1 || n_bits > 63) throw InvalidParameterError("from_index needs 1..63 bits");
  if (n_bits < 63 && (index >> n_bits) != 0)
    throw InvalidParameterError("index out of range for bit count");
  Assignment a(n_bits);
  a.w_[0] = index;
  return a;
}

bool Assignment::lex_less(const Assignment& other) const {
  if (n_ != other.n_) throw InvalidParameterError("lex_less needs equal sizes");
  for (std::size_t k = 0; k < w_.size(); ++k) {
    const std::uint64_t x = w_[k] ^ other.w_[k];
    if (x) {
      const int b = std::countr_zero(x);  // lowest differing bit decides ('0' < '1')
      return ((w_[k] >> b) & 1u) == 0;
    }
  }
  return false;
}

Clause::Clause(int i, int j, int k) : bits{i, j, k} {
  std::sort(bits.begin(), bits.end());
  if (bits[0] < 1) throw InvalidParameterError("clause indices must be >= 1");
  if (bits[0] == bits[1] || bits[1] == bits[2])
    throw InvalidParameterError("clause indices must be distinct");
}

Instance generate_instance(int n_bits, int n_clauses, SplitRng& rng) {
  if (n_bits < 3) throw InvalidParameterError("need at least 3 bits for a clause");
  if (n_clauses < 0) throw InvalidParameterError("clause count must be nonnegative");
  Instance inst;
  inst.n_bits = n_bits;
  inst.clauses.reserve(std::size_t(n_clauses));
  for (int c = 0; c < n_clauses; ++c) {
    int i, j, k;
    do {  // rejection keeps the draw uniform over 3-subsets
      i = int(rng.next_below(std::uint64_t(n_bits))) + 1;
      j = int(rng.next_below(std::uint64_t(n_bits))) + 1;
      k = int(rng.next_below(std::uint64_t(n_bits))) + 1;
    } while (i == j || j == k || i == k);
    inst.clauses.emplace_back(i, j, k);
  }
  return inst;
}

Instance generate_instance(int n_bits, int n_clauses, std::uint64_t seed) {
  SplitRng rng(seed);
  return generate_instance(n_bits, n_clauses, rng);
}

long long cost(const Instance& inst, const Assignment& x) {
  if (x.n_bits() != inst.n_bits)
    throw InvalidParameterError("assignment length does not match instance");
  long long total = 0;
  for (const Clause& c : inst.clauses) total += c.value_under(x);
  return total;
}

long long IsingCoefficients::j_of(int i, int j) const {
  if (i == j) throw InvalidParameterError("no self-coupling");
  if (i > j) std::swap(i, j);
  for (const auto& e : couplings)
    if (e[0] == i && e[1] == j) return e[2];
  return 0;
}

long long IsingCoefficients::energy(const Assignment& x) const {
  // 4*cost = 4*constant - 2 sum B_i s_i + sum_{i<j} 2 J_ij s_i s_j
  long long four = 4 * constant;
  for (int i = 1; i < int(b.size()); ++i) {
    const long long s = x.get(i) ? -1 : 1;
    four -= 2 * b[std::size_t(i)] * s;
  }
  for (const auto& e : couplings) {
    const long long si = x.get(int(e[0])) ? -1 : 1;
    const long long sj = x.get(int(e[1])) ? -1 : 1;
    four += 2 * e[2] * si * sj;
  }
  if (four % 4 != 0) throw InvalidParameterError("ising form did not evaluate to an integer");
  return four / 4;
}

IsingCoefficients ising_coefficients(const Instance& inst) {
  IsingCoefficients out;
  out.constant = (long long)(inst.clauses.size());
  out.b.assign(std::size_t(inst.n_bits) + 1, 0);
  std::map<std::pair<int, int>, long long> j;
  for (const Clause& c : inst.clauses) {
    for (int t = 0; t < 3; ++t) out.b[std::size_t(c.bits[std::size_t(t)])] += 1;
    j[{c.bits[0], c.bits[1]}] += 1;
    j[{c.bits[0], c.bits[2]}] += 1;
    j[{c.bits[1], c.bits[2]}] += 1;
  }
  out.couplings.reserve(j.size());
  for (const auto& [key, val] : j)
    out.couplings.push_back({key.first, key.second, val});
  return out;
}

Instance add_clause(const Instance& inst, const Clause& c) {
  if (c.bits[2] > inst.n_bits) throw InvalidParameterError("clause index exceeds bit count");
  Instance out = inst;
  out.clauses.push_back(c);
  return out;
}

std::vector<int> free_bits(const Instance& inst) {
  std::vector<char> used(std::size_t(inst.n_bits) + 1, 0);
  for (const Clause& c : inst.clauses)
    for (int t = 0; t < 3; ++t) used[std::size_t(c.bits[std::size_t(t)])] = 1;
  std::vector<int> out;
  for (int i = 1; i <= inst.n_bits; ++i)
    if (!used[std::size_t(i)]) out.push_back(i);
  return out;
}

ReducedInstance strip_free_bits(const Instance& inst) {
  std::vector<char> is_free(std::size_t(inst.n_bits) + 1, 1);
  for (const Clause& c : inst.clauses)
    for (int t = 0; t < 3; ++t) is_free[std::size_t(c.bits[std::size_t(t)])] = 0;
  ReducedInstance out;
  std::vector<int> new_index(std::size_t(inst.n_bits) + 1, 0);
  for (int i = 1; i <= inst.n_bits; ++i) {
    if (!is_free[std::size_t(i)]) {
      out.kept_bits.push_back(i);
      new_index[std::size_t(i)] = int(out.kept_bits.size());
    }
  }
  out.instance.n_bits = int(out.kept_bits.size());
  out.instance.clauses.reserve(inst.clauses.size());
  for (const Clause& c : inst.clauses)
    out.instance.clauses.emplace_back(new_index[std::size_t(c.bits[0])],
                                      new_index[std::size_t(c.bits[1])],
                                      new_index[std::size_t(c.bits[2])]);
  return out;
}

std::string instance_to_json(const Instance& inst) {
  ordered_json doc;
  doc["n"] = inst.n_bits;
  doc["clauses"] = ordered_json::array();
  for (const Clause& c : inst.clauses)
    doc["clauses"].push_back({c.bits[0], c.bits[1], c.bits[2]});
  return doc.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("clauses"))
    throw ParseError("instance json needs keys n, clauses");
  if (!doc["n"].is_number_integer()) throw ParseError("n must be an integer");
  Instance inst;
  inst.n_bits = doc["n"].get<int>();
  if (inst.n_bits < 1) throw ParseError("n must be positive");
  if (!doc["clauses"].is_array()) throw ParseError("clauses must be an array");
  for (const auto& cj : doc["clauses"]) {
    if (!cj.is_array() || cj.size() != 3) throw ParseError("each clause is a triple");
    int idx[3];
    for (int t = 0; t < 3; ++t) {
      if (!cj[std::size_t(t)].is_number_integer()) throw ParseError("clause indices are integers");
      idx[t] = cj[std::size_t(t)].get<int>();
      if (idx[t] < 1 || idx[t] > inst.n_bits)
        throw ParseError("clause index out of range");
    }
    if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2])
      throw ParseError("clause indices repeat");
    inst.clauses.emplace_back(idx[0], idx[1], idx[2]);
  }
  return inst;
}

}  // namespace gaplab
