#include "gaplab/spectrum.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

#include "gaplab/errors.hpp"
#include "gaplab/io.hpp"
#include "gaplab/rng.hpp"

namespace gaplab {
namespace {

constexpr int kDenseMaxBits = 12;
constexpr int kIterMaxBits = 24;
constexpr int kApplyMaxBits = 28;
constexpr std::uint64_t kStartSeed = 0x5EEDBA5Eu;

inline long long clause_value(int ones) {
  const long long s = ones - 1;
  return s * s;
}

// Diagonal of the cost operator over all 2^N assignments, filled by a Gray
// walk with per-clause one-counts (each step is one bit flip).
std::vector<int> full_diagonal(const Instance& inst) {
  const size_t dim = size_t(1) << inst.n_bits;
  std::vector<std::vector<int>> clauses_of(size_t(inst.n_bits) + 1);
  std::vector<int> ones(inst.clauses.size(), 0);
  long long cost_now = 0;
  for (size_t c = 0; c < inst.clauses.size(); ++c) {
    for (int b : inst.clauses[c].bits) clauses_of[size_t(b)].push_back(int(c));
    cost_now += clause_value(0);
  }
  std::vector<char> bitval(size_t(inst.n_bits) + 1, 0);
  std::vector<int> diag(dim, 0);
  diag[0] = int(cost_now);
  for (size_t i = 1; i < dim; ++i) {
    const int bit = std::countr_zero(i) + 1;  // 1-based
    const int delta = bitval[size_t(bit)] ? -1 : +1;
    for (int c : clauses_of[size_t(bit)]) {
      cost_now -= clause_value(ones[size_t(c)]);
      ones[size_t(c)] += delta;
      cost_now += clause_value(ones[size_t(c)]);
    }
    bitval[size_t(bit)] = char(1 - bitval[size_t(bit)]);
    diag[i ^ (i >> 1)] = int(cost_now);
  }
  return diag;
}

struct CubeOperator {
  int n;
  size_t dim;
  std::vector<int> diag;

  explicit CubeOperator(const Instance& inst)
      : n(inst.n_bits), dim(size_t(1) << inst.n_bits), diag(full_diagonal(inst)) {}

  void apply(double lambda, const double* v, double* y) const {
    for (size_t i = 0; i < dim; ++i) y[i] = double(diag[i]) * v[i];
    for (int t = 0; t < n; ++t) {
      const size_t bit = size_t(1) << t;
      for (size_t i = 0; i < dim; ++i) y[i] -= lambda * v[i ^ bit];
    }
  }
};

double dot(const StateVector& a, const StateVector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const StateVector& a) { return std::sqrt(dot(a, a)); }

void axpy(double c, const StateVector& x, StateVector& y) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

SpectrumResult diagonal_bypass(const CubeOperator& op, int k, bool want_vectors) {
  std::vector<size_t> idx(op.dim);
  std::iota(idx.begin(), idx.end(), size_t(0));
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return op.diag[a] < op.diag[b]; });
  SpectrumResult r;
  r.lambda = 0.0;
  for (int i = 0; i < k; ++i) {
    r.eigenvalues.push_back(double(op.diag[idx[size_t(i)]]));
    r.residual_norms.push_back(0.0);
    if (want_vectors) {
      StateVector v(op.dim, 0.0);
      v[idx[size_t(i)]] = 1.0;
      r.eigenvectors.push_back(std::move(v));
    }
  }
  if (k >= 2) r.gap = r.eigenvalues[1] - r.eigenvalues[0];
  return r;
}

SpectrumResult dense_solve(const CubeOperator& op, double lambda, int k, bool want_vectors) {
  const Eigen::Index dim = Eigen::Index(op.dim);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    h(i, i) = double(op.diag[size_t(i)]);
    for (int t = 0; t < op.n; ++t) h(i, i ^ (Eigen::Index(1) << t)) = -lambda;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("dense eigensolver failed", -1.0);

  SpectrumResult r;
  r.lambda = lambda;
  StateVector v(op.dim), hv(op.dim);
  for (int i = 0; i < k; ++i) {
    const double ev = es.eigenvalues()(i);
    r.eigenvalues.push_back(ev);
    for (size_t j = 0; j < op.dim; ++j) v[j] = es.eigenvectors()(Eigen::Index(j), i);
    op.apply(lambda, v.data(), hv.data());
    double rn = 0.0;
    for (size_t j = 0; j < op.dim; ++j) {
      const double d = hv[j] - ev * v[j];
      rn += d * d;
    }
    r.residual_norms.push_back(std::sqrt(rn));
    if (want_vectors) r.eigenvectors.push_back(v);
  }
  if (k >= 2) r.gap = r.eigenvalues[1] - r.eigenvalues[0];
  return r;
}

// Lanczos with full (twice-repeated classical Gram-Schmidt) reorthogonalization
// against the stored basis; breakdowns restart with a fresh random direction,
// splitting the tridiagonal into blocks. Residuals are verified matrix-free
// before the result is accepted.
SpectrumResult lanczos_solve(const CubeOperator& op, double lambda, int k, bool want_vectors,
                             long long m_clauses) {
  const size_t dim = op.dim;
  const double tol = 1e-10 * (double(m_clauses) + lambda * op.n);
  const double breakdown = 1e-13 * (double(m_clauses) + lambda * op.n + 1.0);

  // Memory guard: the stored basis dominates; stay within ~2.5 GB.
  const size_t mem_cap = std::max<size_t>(size_t(k) + 4, size_t(2.5e9) / (dim * 8));
  const size_t max_iter = std::min<size_t>(std::min<size_t>(400, dim), mem_cap);

  SplitRng rng(kStartSeed);
  auto random_vector = [&]() {
    StateVector v(dim);
    for (size_t i = 0; i < dim; ++i) v[i] = rng.next_double() - 0.5;
    return v;
  };

  std::vector<StateVector> basis;
  std::vector<double> alpha, beta;
  {
    StateVector v0 = random_vector();
    const double nv = norm(v0);
    for (double& x : v0) x /= nv;
    basis.push_back(std::move(v0));
  }

  StateVector w(dim);
  double best_resid = std::numeric_limits<double>::infinity();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  const auto try_extract = [&](size_t m) -> std::optional<SpectrumResult> {
    if (m < size_t(k)) return std::nullopt;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(Eigen::Index(m));
    Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max<Eigen::Index>(Eigen::Index(m) - 1, 0));
    for (size_t i = 0; i < m; ++i) d(Eigen::Index(i)) = alpha[i];
    for (size_t i = 0; i + 1 < m; ++i) sub(Eigen::Index(i)) = beta[i];
    tri.computeFromTridiagonal(d, sub);
    if (tri.info() != Eigen::Success) return std::nullopt;
    // Cheap bound first: |beta_m * bottom component of the Ritz vector in T|.
    const double edge = beta.size() >= m ? beta[m - 1] : 0.0;
    bool plausible = true;
    for (int i = 0; i < k; ++i) {
      const double est = std::abs(edge * tri.eigenvectors()(Eigen::Index(m) - 1, i));
      best_resid = std::min(best_resid, std::max(est, 0.0));
      if (est > tol) plausible = false;
    }
    if (!plausible) return std::nullopt;
    // Form Ritz vectors and verify true residuals.
    SpectrumResult r;
    r.lambda = lambda;
    StateVector y(dim), hy(dim);
    std::vector<StateVector> vecs;
    std::vector<double> resids;
    for (int i = 0; i < k; ++i) {
      std::fill(y.begin(), y.end(), 0.0);
      for (size_t j = 0; j < m; ++j)
        axpy(tri.eigenvectors()(Eigen::Index(j), i), basis[j], y);
      const double ny = norm(y);
      if (ny <= 0.0) return std::nullopt;
      for (double& x : y) x /= ny;
      op.apply(lambda, y.data(), hy.data());
      const double theta = tri.eigenvalues()(i);
      double rn = 0.0;
      for (size_t j = 0; j < dim; ++j) {
        const double dd = hy[j] - theta * y[j];
        rn += dd * dd;
      }
      rn = std::sqrt(rn);
      best_resid = std::min(best_resid, rn);
      if (rn > tol) return std::nullopt;
      resids.push_back(rn);
      vecs.push_back(y);
    }
    for (int i = 0; i < k; ++i) r.eigenvalues.push_back(tri.eigenvalues()(i));
    r.residual_norms = std::move(resids);
    if (want_vectors) r.eigenvectors = std::move(vecs);
    if (k >= 2) r.gap = r.eigenvalues[1] - r.eigenvalues[0];
    return r;
  };

  for (size_t j = 0; j < max_iter; ++j) {
    op.apply(lambda, basis[j].data(), w.data());
    if (j > 0 && beta[j - 1] != 0.0) axpy(-beta[j - 1], basis[j - 1], w);
    const double a = dot(w, basis[j]);
    axpy(-a, basis[j], w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (size_t i = 0; i <= j; ++i) axpy(-dot(w, basis[i]), basis[i], w);

    double b = norm(w);
    if (b <= breakdown) {
      if (basis.size() >= dim) {
        beta.push_back(0.0);
        break;  // whole space spanned
      }
      StateVector fresh = random_vector();
      for (int pass = 0; pass < 2; ++pass)
        for (size_t i = 0; i <= j; ++i) axpy(-dot(fresh, basis[i]), basis[i], fresh);
      const double nf = norm(fresh);
      if (nf <= breakdown) {
        beta.push_back(0.0);
        break;
      }
      for (double& x : fresh) x /= nf;
      w = std::move(fresh);
      b = 0.0;  // block boundary in the tridiagonal
      beta.push_back(b);
      basis.push_back(w);
    } else {
      beta.push_back(b);
      StateVector next = w;
      for (double& x : next) x /= b;
      basis.push_back(std::move(next));
    }

    const size_t m = j + 1;
    const bool check = m >= size_t(k) + 1 && (m <= 64 || m % 8 == 0 || m == max_iter);
    if (check) {
      if (auto r = try_extract(m)) return std::move(*r);
    }
  }

  if (auto r = try_extract(alpha.size())) return std::move(*r);
  throw ConvergenceError("Krylov iteration did not reach the residual tolerance", best_resid);
}

EigMethod resolve_method(EigMethod method, int n_bits) {
  if (method != EigMethod::kAuto) return method;
  return n_bits <= kDenseMaxBits ? EigMethod::kDense : EigMethod::kIterative;
}

EigMethod resolve_scan_method(EigMethod method, int n_bits) {
  if (method != EigMethod::kAuto) return method;
  return n_bits <= 6 ? EigMethod::kDense : EigMethod::kIterative;
}

}  // namespace

StateVector apply_hamiltonian(const Instance& inst, double lambda, const StateVector& v) {
  if (inst.n_bits > kApplyMaxBits)
    throw SizeLimitError("operator application is limited to 28 bits");
  if (!(lambda >= 0.0)) throw InvalidParameterError("lambda must be non-negative");
  if (v.size() != size_t(1) << inst.n_bits)
    throw InvalidParameterError("state vector length must be 2^N");
  if (inst.n_bits <= kIterMaxBits) {
    CubeOperator op(inst);
    StateVector y(op.dim);
    op.apply(lambda, v.data(), y.data());
    return y;
  }
  // Above the precompute threshold, walk the diagonal on the fly to avoid a
  // third 2^N-sized buffer.
  const size_t dim = size_t(1) << inst.n_bits;
  StateVector y(dim);
  {
    std::vector<std::vector<int>> clauses_of(size_t(inst.n_bits) + 1);
    std::vector<int> ones(inst.clauses.size(), 0);
    long long cost_now = 0;
    for (size_t c = 0; c < inst.clauses.size(); ++c) {
      for (int b : inst.clauses[c].bits) clauses_of[size_t(b)].push_back(int(c));
      cost_now += clause_value(0);
    }
    std::vector<char> bitval(size_t(inst.n_bits) + 1, 0);
    y[0] = double(cost_now) * v[0];
    for (size_t i = 1; i < dim; ++i) {
      const int bit = std::countr_zero(i) + 1;
      const int delta = bitval[size_t(bit)] ? -1 : +1;
      for (int c : clauses_of[size_t(bit)]) {
        cost_now -= clause_value(ones[size_t(c)]);
        ones[size_t(c)] += delta;
        cost_now += clause_value(ones[size_t(c)]);
      }
      bitval[size_t(bit)] = char(1 - bitval[size_t(bit)]);
      const size_t state = i ^ (i >> 1);
      y[state] = double(cost_now) * v[state];
    }
  }
  for (int t = 0; t < inst.n_bits; ++t) {
    const size_t bit = size_t(1) << t;
    for (size_t i = 0; i < dim; ++i) y[i] -= lambda * v[i ^ bit];
  }
  return y;
}

SpectrumResult lowest_eigenpairs(const Instance& inst, double lambda, int k, EigMethod method,
                                 bool want_vectors) {
  if (k < 1 || k > 8) throw InvalidParameterError("k must lie in [1,8]");
  if (!(lambda >= 0.0)) throw InvalidParameterError("lambda must be non-negative");
  if (inst.n_bits > kIterMaxBits)
    throw SizeLimitError("eigensolves are limited to 24 bits");
  const size_t dim = size_t(1) << inst.n_bits;
  if (size_t(k) > dim) throw InvalidParameterError("k exceeds the space dimension");

  CubeOperator op(inst);
  if (lambda == 0.0) return diagonal_bypass(op, k, want_vectors);

  const EigMethod m = resolve_method(method, inst.n_bits);
  if (m == EigMethod::kDense) {
    if (inst.n_bits > kDenseMaxBits)
      throw SizeLimitError("dense diagonalization is limited to 12 bits");
    return dense_solve(op, lambda, k, want_vectors);
  }
  return lanczos_solve(op, lambda, k, want_vectors, (long long)(inst.clauses.size()));
}

std::vector<GapPoint> gap_curve(const Instance& inst, const std::vector<double>& lambdas,
                                EigMethod method) {
  if (lambdas.empty()) throw InvalidParameterError("lambda grid is empty");
  for (size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1]))
      throw InvalidParameterError("lambda grid must be strictly ascending");
  const EigMethod m = resolve_scan_method(method, inst.n_bits);
  std::vector<GapPoint> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) {
    SpectrumResult r = lowest_eigenpairs(inst, l, 2, m, false);
    out.push_back({l, r.gap, r.eigenvalues[0], r.eigenvalues[1]});
  }
  return out;
}

std::string gap_curve_to_csv(const std::vector<GapPoint>& points) {
  std::string s = "lambda,gap,e0,e1\n";
  for (const GapPoint& p : points) {
    s += format_g17(p.lambda);
    s += ',';
    s += format_g17(p.gap);
    s += ',';
    s += format_g17(p.e0);
    s += ',';
    s += format_g17(p.e1);
    s += '\n';
  }
  return s;
}

namespace detail {

std::pair<double, double> minimize_on_grid(const std::function<double(double)>& f, double lo,
                                           double hi, double tol) {
  if (!(lo < hi)) throw InvalidParameterError("need lo < hi");
  if (!(tol > 0.0)) throw InvalidParameterError("tol must be positive");

  constexpr int kGrid = 64;
  double best_x = lo, best_f = std::numeric_limits<double>::infinity();
  int best_i = 0;
  std::array<double, kGrid> xs{}, fs{};
  for (int i = 0; i < kGrid; ++i) {
    xs[size_t(i)] = lo + (hi - lo) * double(i) / double(kGrid - 1);
    fs[size_t(i)] = f(xs[size_t(i)]);
    if (fs[size_t(i)] < best_f) {
      best_f = fs[size_t(i)];
      best_x = xs[size_t(i)];
      best_i = i;
    }
  }
  if (best_i == 0 || best_i == kGrid - 1) return {best_x, best_f};

  double a = xs[size_t(best_i - 1)], b = xs[size_t(best_i + 1)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  auto track = [&](double x, double fx) {
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  };
  track(c, fc);
  track(d, fd);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
      track(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
      track(d, fd);
    }
  }
  return {best_x, best_f};
}

}  // namespace detail

MinGapResult min_gap_scan(const Instance& inst, double lo, double hi, double tol,
                          EigMethod method) {
  if (!(lo >= 0.0) || !(lo < hi)) throw InvalidParameterError("need 0 <= lo < hi");
  if (!(tol > 0.0)) throw InvalidParameterError("tol must be positive");
  const EigMethod m = resolve_scan_method(method, inst.n_bits);
  auto f = [&](double l) { return lowest_eigenpairs(inst, l, 2, m, false).gap; };
  auto [x, g] = detail::minimize_on_grid(f, lo, hi, tol);
  return {x, g};
}

double eigenstate_overlap(const SpectrumResult& result, std::size_t which, const Assignment& x) {
  if (which >= result.eigenvectors.size())
    throw InvalidParameterError("spectrum result carries no eigenvector at that index");
  const StateVector& v = result.eigenvectors[which];
  if (v.size() != size_t(1) << x.n_bits())
    throw InvalidParameterError("assignment length does not match the state dimension");
  const double amp = v[x.to_index()];
  const double n2 = dot(v, v);
  if (!(n2 > 0.0)) throw InvalidParameterError("eigenvector has zero norm");
  return amp * amp / n2;
}

double ground_state_overlap(const SpectrumResult& result, const Assignment& x) {
  return eigenstate_overlap(result, 0, x);
}

}  // namespace gaplab
