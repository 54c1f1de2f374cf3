#include "gaplab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "gaplab/errors.hpp"
#include "gaplab/estimates.hpp"
#include "gaplab/io.hpp"
#include "gaplab/rng.hpp"
#include "gaplab/spectrum.hpp"

namespace gaplab {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void validate_config(const SweepConfig& c) {
  if (c.n_values.empty()) throw InvalidParameterError("n_values must be non-empty");
  for (int n : c.n_values) {
    if (n < 3) throw InvalidParameterError("every N must be at least 3");
    if (std::llround(c.alpha * n) < 1)
      throw InvalidParameterError("alpha * N rounds to zero clauses");
  }
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw InvalidParameterError("alpha must be in (0,1]");
  if (c.samples_per_n < 1) throw InvalidParameterError("samples_per_n must be positive");
  if (c.max_order < 2 || c.max_order > 3)
    throw InvalidParameterError("sweep max_order must be 2 or 3");
  if (c.min_pair_distance <= 2 * c.max_order)
    throw InvalidParameterError("min_pair_distance must exceed 2 * max_order");
  if (c.node_budget == 0) throw InvalidParameterError("node_budget must be positive");
}

struct Outcome {
  // 0 = kept, 1 = unsat, 2 = budget, 3 = no_pair, 4 = resonant
  int tag = 2;
  std::array<double, 3> sq{0.0, 0.0, 0.0};
};

Outcome run_cell(const SweepConfig& cfg, int n, int sample) {
  SplitRng rng = SplitRng(cfg.master_seed).split(std::uint64_t(n)).split(std::uint64_t(sample));
  const int m_clauses = int(std::llround(cfg.alpha * n));
  const Instance inst = generate_instance(n, m_clauses, rng);
  const SolutionSet set = enumerate_solutions(inst, cfg.node_budget);
  if (set.complete && set.solutions.empty()) return {1, {}};
  const auto pair = select_pair(set, cfg.min_pair_distance);
  if (!pair) return {set.complete ? 3 : 2, {}};
  Outcome out;
  try {
    const SplittingSeries sp = splitting(inst, *pair, cfg.max_order);
    for (int m = 1; m <= cfg.max_order; ++m)
      out.sq[size_t(m - 1)] = sp.d[size_t(m - 1)] * sp.d[size_t(m - 1)];
    out.tag = 0;
  } catch (const GaplabError&) {
    out.tag = 4;
  }
  return out;
}

void check_indices(const SweepResult& r, int n_idx, int m) {
  if (n_idx < 0 || size_t(n_idx) >= r.sq.size())
    throw InvalidParameterError("n index out of range");
  if (m < 1 || m > r.config.max_order) throw InvalidParameterError("order out of range");
}

}  // namespace

nlohmann::ordered_json sweep_config_to_json(const SweepConfig& c) {
  nlohmann::ordered_json j;
  j["n_values"] = c.n_values;
  j["alpha"] = c.alpha;
  j["samples_per_n"] = c.samples_per_n;
  j["master_seed"] = c.master_seed;
  j["max_order"] = c.max_order;
  j["min_pair_distance"] = c.min_pair_distance;
  j["node_budget"] = c.node_budget;
  return j;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig c;
  try {
    c.n_values = j.at("n_values").get<std::vector<int>>();
    c.alpha = j.at("alpha").get<double>();
    c.samples_per_n = j.at("samples_per_n").get<int>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("max_order")) c.max_order = j.at("max_order").get<int>();
    if (j.contains("min_pair_distance"))
      c.min_pair_distance = j.at("min_pair_distance").get<int>();
    if (j.contains("node_budget")) c.node_budget = j.at("node_budget").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sweep config: ") + e.what());
  }
  validate_config(c);
  return c;
}

long long SweepResult::used(int n_idx) const {
  check_indices(*this, n_idx, 1);
  return (long long)(sq[size_t(n_idx)][0].size());
}

double SweepResult::mean_sq(int n_idx, int m) const {
  check_indices(*this, n_idx, m);
  const auto& v = sq[size_t(n_idx)][size_t(m - 1)];
  if (v.empty()) return kNan;
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double SweepResult::stderr_sq(int n_idx, int m) const {
  check_indices(*this, n_idx, m);
  const auto& v = sq[size_t(n_idx)][size_t(m - 1)];
  if (v.empty()) return kNan;
  if (v.size() < 2) return 0.0;
  const double mean = mean_sq(n_idx, m);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / double(v.size() - 1)) / std::sqrt(double(v.size()));
}

double SweepResult::median_sq(int n_idx, int m) const {
  check_indices(*this, n_idx, m);
  std::vector<double> v = sq[size_t(n_idx)][size_t(m - 1)];
  if (v.empty()) return kNan;
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

SweepResult splitting_sweep(const SweepConfig& config, int jobs) {
  validate_config(config);
  if (jobs < 1) throw InvalidParameterError("jobs must be positive");

  const size_t n_count = config.n_values.size();
  const size_t per_n = size_t(config.samples_per_n);
  const size_t total = n_count * per_n;
  std::vector<Outcome> slots(total);

  std::atomic<size_t> cursor{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const size_t t = cursor.fetch_add(1);
      if (t >= total) return;
      const size_t n_idx = t / per_n;
      const int sample = int(t % per_n);
      try {
        slots[t] = run_cell(config, config.n_values[n_idx], sample);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const size_t n_threads = std::min<size_t>(size_t(jobs), std::max<size_t>(total, 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepResult r;
  r.config = config;
  r.sq.assign(n_count, std::vector<std::vector<double>>(size_t(config.max_order)));
  r.discards.assign(n_count, DiscardCounts{});
  for (size_t t = 0; t < total; ++t) {
    const size_t n_idx = t / per_n;
    const Outcome& o = slots[t];
    switch (o.tag) {
      case 0:
        for (int m = 1; m <= config.max_order; ++m)
          r.sq[n_idx][size_t(m - 1)].push_back(o.sq[size_t(m - 1)]);
        break;
      case 1: ++r.discards[n_idx].unsat; break;
      case 2: ++r.discards[n_idx].budget; break;
      case 3: ++r.discards[n_idx].no_pair; break;
      default: ++r.discards[n_idx].resonant; break;
    }
  }
  return r;
}

FitResult linear_fit(const std::vector<FitPoint>& points) {
  if (points.size() < 2) throw InvalidParameterError("fit needs at least two points");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (const FitPoint& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.weight) || p.weight <= 0.0)
      throw InvalidParameterError("fit points must be finite with positive weights");
    sw += p.weight;
    swx += p.weight * p.x;
    swy += p.weight * p.y;
    swxx += p.weight * p.x * p.x;
    swxy += p.weight * p.x * p.y;
  }
  const double det = sw * swxx - swx * swx;
  const double scale = sw * swxx + swx * swx;
  if (!(det > scale * 1e-14)) throw InvalidParameterError("fit abscissae are degenerate");

  FitResult f;
  f.n_points = int(points.size());
  f.slope = (sw * swxy - swx * swy) / det;
  f.intercept = (swy - f.slope * swx) / sw;
  const double ybar = swy / sw;
  double ss_tot = 0, ss_res = 0;
  for (const FitPoint& p : points) {
    const double pred = f.intercept + f.slope * p.x;
    ss_tot += p.weight * (p.y - ybar) * (p.y - ybar);
    ss_res += p.weight * (p.y - pred) * (p.y - pred);
  }
  f.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return f;
}

FitResult sweep_fit(const SweepResult& result, int m) {
  if (m < 2 || m > result.config.max_order)
    throw InvalidParameterError("fits are defined for orders 2..max_order");
  std::vector<FitPoint> pts;
  for (size_t i = 0; i < result.config.n_values.size(); ++i) {
    if (result.used(int(i)) == 0) continue;
    const double y = result.mean_sq(int(i), m);
    const double se = result.stderr_sq(int(i), m);
    pts.push_back({double(result.config.n_values[i]), y, se > 0.0 ? 1.0 / (se * se) : 1.0});
  }
  return linear_fit(pts);
}

std::optional<double> locate_crossing(const SeriesCoefficients& a, const SeriesCoefficients& b,
                                      double lo, double hi, double tol) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidParameterError("need a finite bracket with lo < hi");
  if (!(tol > 0.0)) throw InvalidParameterError("tol must be positive");
  auto g = [&](double l) { return a.eval(l) - b.eval(l); };
  double ga = g(lo), gb = g(hi);
  if (ga == 0.0) return lo;
  if (gb == 0.0) return hi;
  if ((ga < 0.0) == (gb < 0.0)) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (ga < 0.0)) {
      lo = mid;
      ga = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double adiabatic_time_estimate(double delta, double epsilon) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InvalidParameterError("gap must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidParameterError("epsilon must be in (0,1)");
  return 1.0 / (epsilon * delta * delta);
}

CrossingBuild build_anticrossing(const Instance& base, const SolutionPair& pair,
                                 const CrossingOptions& opts) {
  if (opts.max_order < 1 || opts.max_order > 3)
    throw InvalidParameterError("max_order must be in [1,3]");
  if (!(opts.tol > 0.0)) throw InvalidParameterError("tol must be positive");
  if (opts.curve_points < 2) throw InvalidParameterError("curve_points must be at least 2");
  if (!(opts.overlap_delta > 0.0 && opts.overlap_delta < 1.0))
    throw InvalidParameterError("overlap_delta must be in (0,1)");
  if (opts.favored_override < 0 || opts.favored_override > 2)
    throw InvalidParameterError("favored_override must be 0, 1 or 2");
  if (opts.mc_samples == 0) throw InvalidParameterError("mc_samples must be positive");
  if (cost(base, pair.sigma1) != 0 || cost(base, pair.sigma2) != 0)
    throw InvalidParameterError("the pair must solve the base instance");

  const int n = hamming_distance(pair.sigma1, pair.sigma2);
  if (n < 3)
    throw PairTooCloseError("pair distance must be at least 3 to support the construction");
  const int m_dec = std::min(opts.max_order, (n - 1) / 2);

  const double lambda_ref =
      opts.lambda_ref_override > 0.0
          ? opts.lambda_ref_override
          : std::min(lambda_star(opts.f2_reference, base.n_bits),
                     0.5 * lambda_cr_estimate(base.n_bits));

  CrossingBuild build;
  int favored = opts.favored_override;
  if (favored == 0) {
    try {
      const SeriesCoefficients s1 = series_coefficients(base, pair.sigma1, m_dec);
      const SeriesCoefficients s2 = series_coefficients(base, pair.sigma2, m_dec);
      const double e1 = s1.eval(lambda_ref), e2 = s2.eval(lambda_ref);
      if (e1 < e2)
        favored = 1;
      else if (e2 < e1)
        favored = 2;
      else
        favored = pair.sigma1.lex_less(pair.sigma2) ? 1 : 2;
    } catch (const GaplabError& e) {
      build.status = CrossingStatus::kSeriesFailure;
      build.error_kind = e.kind();
      build.error_message = e.what();
      return build;
    }
  }
  const Assignment& fav = favored == 1 ? pair.sigma1 : pair.sigma2;
  const Assignment& keep = favored == 1 ? pair.sigma2 : pair.sigma1;

  const std::vector<Clause> cands = distinguishing_clauses(base, keep, fav);
  if (cands.empty()) {
    build.status = CrossingStatus::kNoDistinguishingClause;
    return build;
  }

  CrossingReport r;
  r.base_instance = base;
  r.added = cands.front();
  r.final_instance = add_clause(base, r.added);
  r.penalty = int(r.added.value_under(fav));
  r.sigma1 = keep;
  r.sigma2 = fav;
  r.distance = n;
  r.decision_order = m_dec;
  r.lambda_ref = lambda_ref;

  try {
    r.series1 = series_coefficients(r.final_instance, r.sigma1, opts.max_order);
    r.series2 = series_coefficients(r.final_instance, r.sigma2, opts.max_order);
  } catch (const GaplabError& e) {
    build.status = CrossingStatus::kSeriesFailure;
    build.error_kind = e.kind();
    build.error_message = e.what();
    return build;
  }

  auto diff = [&](double l) { return r.series1.eval(l) - r.series2.eval(l); };
  double hi = opts.bracket_hi;
  if (hi <= 0.0) {
    hi = std::max(lambda_ref, 1e-3);
    while (hi < 3.0 && diff(hi) <= 0.0) hi *= 1.5;
    hi = std::min(hi, 3.0);
  }
  const auto lc = locate_crossing(r.series1, r.series2, 0.0, hi, opts.tol);
  if (!lc) {
    build.status = CrossingStatus::kNoCrossingInBracket;
    return build;
  }
  r.lambda_c = *lc;

  for (int i = 0; i < opts.curve_points; ++i) {
    const double l = 1.25 * r.lambda_c * double(i) / double(opts.curve_points - 1);
    r.curve_lambdas.push_back(l);
    r.curve_e1.push_back(r.series1.eval(l));
    r.curve_e2.push_back(r.series2.eval(l));
  }

  const SolutionPair tp{r.sigma1, r.sigma2, n};
  try {
    r.v12 = n <= 24 ? tunneling_dp(base, tp)
                    : tunneling_mc(base, tp, (long long)(opts.mc_samples), opts.mc_seed);
  } catch (const GaplabError& e) {
    build.status = CrossingStatus::kSeriesFailure;
    build.error_kind = e.kind();
    build.error_message = e.what();
    return build;
  }
  r.v12_at_lambda_c = r.v12.amplitude(r.lambda_c);
  r.gap_band_lo = r.v12_at_lambda_c;
  r.gap_band_hi = 2.0 * r.v12_at_lambda_c;

  if (opts.exact_block && base.n_bits <= 12) {
    const EigMethod method = base.n_bits <= 6 ? EigMethod::kDense : EigMethod::kIterative;
    const MinGapResult scan =
        min_gap_scan(r.final_instance, std::max(1e-6, 0.5 * r.lambda_c), 1.5 * r.lambda_c,
                     1e-5, method);
    r.lambda_min_exact = scan.lambda_min;
    r.delta_min_exact = scan.gap_min;
    r.kappa = r.v12_at_lambda_c > 0.0 ? r.delta_min_exact / r.v12_at_lambda_c : 0.0;

    const double before = scan.lambda_min * (1.0 - opts.overlap_delta);
    const double after = scan.lambda_min * (1.0 + opts.overlap_delta);
    const SpectrumResult gb = lowest_eigenpairs(r.final_instance, before, 2, method, true);
    const SpectrumResult ga = lowest_eigenpairs(r.final_instance, after, 2, method, true);
    r.overlap1_before = eigenstate_overlap(gb, 0, r.sigma1);
    r.overlap2_before = eigenstate_overlap(gb, 0, r.sigma2);
    r.overlap1_x_before = eigenstate_overlap(gb, 1, r.sigma1);
    r.overlap2_x_before = eigenstate_overlap(gb, 1, r.sigma2);
    r.overlap1_after = eigenstate_overlap(ga, 0, r.sigma1);
    r.overlap2_after = eigenstate_overlap(ga, 0, r.sigma2);
    r.overlap1_x_after = eigenstate_overlap(ga, 1, r.sigma1);
    r.overlap2_x_after = eigenstate_overlap(ga, 1, r.sigma2);
    r.swap_ok = r.overlap1_before > r.overlap1_x_before &&
                r.overlap2_x_before > r.overlap2_before &&
                r.overlap1_after < r.overlap1_x_after;
    r.has_exact = true;
  }

  build.status = CrossingStatus::kOk;
  build.report = std::move(r);
  return build;
}

namespace {

void revalidate_crossing(const CrossingReport& r) {
  if (cost(r.final_instance, r.sigma1) != 0)
    throw InvalidParameterError("crossing report: sigma1 no longer solves the final instance");
  if (cost(r.final_instance, r.sigma2) <= 0)
    throw InvalidParameterError("crossing report: sigma2 is not penalized by the final instance");
  const double lo = r.series1.eval(0.99 * r.lambda_c) - r.series2.eval(0.99 * r.lambda_c);
  const double hi = r.series1.eval(1.01 * r.lambda_c) - r.series2.eval(1.01 * r.lambda_c);
  if (!(lo < 0.0 && hi > 0.0))
    throw InvalidParameterError("crossing report: curves do not reorder across lambda_c");
}

nlohmann::ordered_json parsed(const std::string& text) {
  return nlohmann::ordered_json::parse(text);
}

}  // namespace

std::string sweep_to_csv(const SweepResult& result) {
  std::string s = "N,m,mean_sq_split,stderr,samples,discarded\n";
  for (size_t i = 0; i < result.config.n_values.size(); ++i) {
    for (int m = 1; m <= result.config.max_order; ++m) {
      s += std::to_string(result.config.n_values[i]);
      s += ',';
      s += std::to_string(m);
      s += ',';
      s += format_g17(result.mean_sq(int(i), m));
      s += ',';
      s += format_g17(result.stderr_sq(int(i), m));
      s += ',';
      s += std::to_string(result.used(int(i)));
      s += ',';
      s += std::to_string(result.discards[i].total());
      s += '\n';
    }
  }
  return s;
}

nlohmann::ordered_json sweep_fit_to_json(const SweepResult& result) {
  nlohmann::ordered_json j;
  j["config"] = sweep_config_to_json(result.config);
  nlohmann::ordered_json per_n = nlohmann::ordered_json::array();
  for (size_t i = 0; i < result.config.n_values.size(); ++i) {
    nlohmann::ordered_json row;
    row["n"] = result.config.n_values[i];
    row["used"] = result.used(int(i));
    row["discards"] = {{"unsat", result.discards[i].unsat},
                       {"budget", result.discards[i].budget},
                       {"no_pair", result.discards[i].no_pair},
                       {"resonant", result.discards[i].resonant}};
    nlohmann::ordered_json orders = nlohmann::ordered_json::array();
    for (int m = 1; m <= result.config.max_order; ++m) {
      nlohmann::ordered_json o;
      o["m"] = m;
      o["mean_sq"] = result.mean_sq(int(i), m);
      o["stderr"] = result.stderr_sq(int(i), m);
      o["median_sq"] = result.median_sq(int(i), m);
      orders.push_back(std::move(o));
    }
    row["orders"] = std::move(orders);
    per_n.push_back(std::move(row));
  }
  j["per_n"] = std::move(per_n);
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (int m = 2; m <= result.config.max_order; ++m) {
    const FitResult f = sweep_fit(result, m);
    nlohmann::ordered_json o = fit_to_json(f);
    o["m"] = m;
    o["sqrt_slope"] = f.slope > 0.0 ? std::sqrt(f.slope) : kNan;
    fits.push_back(std::move(o));
  }
  j["fits"] = std::move(fits);
  return j;
}

nlohmann::ordered_json fit_to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["n_points"] = fit.n_points;
  return j;
}

nlohmann::ordered_json crossing_to_json(const CrossingReport& report) {
  revalidate_crossing(report);
  nlohmann::ordered_json j;
  j["n_bits"] = report.base_instance.n_bits;
  j["base_instance"] = parsed(instance_to_json(report.base_instance));
  j["final_instance"] = parsed(instance_to_json(report.final_instance));
  j["added_clause"] = report.added.bits;
  j["penalty"] = report.penalty;
  j["sigma1"] = report.sigma1.to_string();
  j["sigma2"] = report.sigma2.to_string();
  j["distance"] = report.distance;
  j["decision_order"] = report.decision_order;
  j["lambda_ref"] = report.lambda_ref;
  j["lambda_c"] = report.lambda_c;
  j["series1"] = parsed(series_to_json(report.series1));
  j["series2"] = parsed(series_to_json(report.series2));
  j["curve"] = {{"lambdas", report.curve_lambdas},
                {"e1", report.curve_e1},
                {"e2", report.curve_e2}};
  j["tunneling"] = parsed(tunneling_to_json(report.v12));
  j["tunneling_under"] = "pair-instance";
  j["v12_at_lambda_c"] = report.v12_at_lambda_c;
  j["gap_band"] = {report.gap_band_lo, report.gap_band_hi};
  if (report.has_exact) {
    j["exact"] = {{"lambda_min", report.lambda_min_exact},
                  {"delta_min", report.delta_min_exact},
                  {"kappa", report.kappa},
                  {"overlap1_before", report.overlap1_before},
                  {"overlap2_before", report.overlap2_before},
                  {"overlap1_after", report.overlap1_after},
                  {"overlap2_after", report.overlap2_after},
                  {"overlap1_excited_before", report.overlap1_x_before},
                  {"overlap2_excited_before", report.overlap2_x_before},
                  {"overlap1_excited_after", report.overlap1_x_after},
                  {"overlap2_excited_after", report.overlap2_x_after},
                  {"swap_ok", report.swap_ok}};
  } else {
    j["exact"] = nullptr;
  }
  return j;
}

std::string crossing_curve_to_csv(const CrossingReport& report) {
  std::string s = "lambda,e1_series,e2_series\n";
  for (size_t i = 0; i < report.curve_lambdas.size(); ++i) {
    s += format_g17(report.curve_lambdas[i]);
    s += ',';
    s += format_g17(report.curve_e1[i]);
    s += ',';
    s += format_g17(report.curve_e2[i]);
    s += '\n';
  }
  return s;
}

void emit_report(const SweepResult& result, const std::string& path, ReportFormat format) {
  if (format == ReportFormat::kCsv)
    atomic_write_file(path, sweep_to_csv(result));
  else
    atomic_write_file(path, sweep_fit_to_json(result).dump(2) + "\n");
}

void emit_report(const CrossingReport& report, const std::string& path, ReportFormat format) {
  if (format == ReportFormat::kJson)
    atomic_write_file(path, crossing_to_json(report).dump(2) + "\n");
  else
    atomic_write_file(path, crossing_curve_to_csv(report));
}

void emit_report(const FitResult& fit, const std::string& path, ReportFormat format) {
  if (format != ReportFormat::kJson)
    throw InvalidParameterError("fit results emit as JSON only");
  atomic_write_file(path, fit_to_json(fit).dump(2) + "\n");
}

}  // namespace gaplab
