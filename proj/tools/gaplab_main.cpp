// gaplab: generate Exact Cover 3 instances, enumerate their solutions, and
// probe the transverse-field spectrum around them (perturbative series,
// tunneling amplitudes, exact gaps, anti-crossing construction, statistics).
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaplab/errors.hpp"
#include "gaplab/estimates.hpp"
#include "gaplab/harness.hpp"
#include "gaplab/instance.hpp"
#include "gaplab/io.hpp"
#include "gaplab/perturbation.hpp"
#include "gaplab/solver.hpp"
#include "gaplab/spectrum.hpp"
#include "gaplab/tunneling.hpp"

namespace {

using nlohmann::ordered_json;

std::uint64_t resolve_seed(const CLI::App& sub, const std::string& flag, std::uint64_t flag_value,
                           std::uint64_t fallback) {
  if (sub.count(flag) > 0) return flag_value;
  if (const char* env = std::getenv("GAPLAB_SEED")) {
    try {
      size_t pos = 0;
      const unsigned long long v = std::stoull(env, &pos);
      if (pos != std::string(env).size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (const std::exception&) {
      throw gaplab::InvalidParameterError("GAPLAB_SEED must be an unsigned integer");
    }
  }
  return fallback;
}

ordered_json make_manifest(const std::string& subcommand, ordered_json parameters) {
  ordered_json m;
  m["tool"] = "gaplab";
  m["version"] = GAPLAB_VERSION;
  m["subcommand"] = subcommand;
  m["parameters"] = std::move(parameters);
  return m;
}

// Empty path means standard output (and no manifest).
void emit(const std::string& out_path, const std::string& content, const ordered_json& manifest) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  gaplab::atomic_write_file(out_path, content);
  gaplab::atomic_write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

gaplab::EigMethod parse_method(const std::string& name) {
  if (name == "auto") return gaplab::EigMethod::kAuto;
  if (name == "dense") return gaplab::EigMethod::kDense;
  return gaplab::EigMethod::kIterative;
}

long long as_count(double v, const char* what) {
  if (!(v >= 0.0) || !(v < 9.3e18) || v != std::floor(v))
    throw gaplab::InvalidParameterError(std::string(what) + " must be a non-negative integer");
  return (long long)(v);
}

const char* status_name(gaplab::CrossingStatus s) {
  switch (s) {
    case gaplab::CrossingStatus::kOk: return "ok";
    case gaplab::CrossingStatus::kNoDistinguishingClause: return "no-distinguishing-clause";
    case gaplab::CrossingStatus::kNoCrossingInBracket: return "no-crossing-in-bracket";
    default: return "series-failure";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Cover 3 instances under a transverse field: spectra, series, statistics"};
  app.require_subcommand(1);

  // --- gen -----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a random EC3 instance (JSON)");
  int gen_n = 0;
  double gen_m = -1.0, gen_alpha = -1.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "Number of bits")->required();
  gen->add_option("--m", gen_m, "Number of clauses");
  gen->add_option("--alpha", gen_alpha, "Clause ratio; m = round(alpha*n) when --m is absent");
  gen->add_option("--seed", gen_seed, "Generator seed (beats GAPLAB_SEED)");
  gen->add_option("--out", gen_out, "Output path (default: stdout)");

  // --- solve ---------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "Enumerate all solutions of an instance (JSON)");
  std::string solve_in, solve_out;
  double solve_budget = 1e6;
  solve->add_option("input", solve_in, "Instance JSON path")->required();
  solve->add_option("--budget", solve_budget, "Search node budget");
  solve->add_option("--out", solve_out, "Output path (default: stdout)");

  // --- coeffs --------------------------------------------------------------
  auto* coeffs = app.add_subcommand(
      "coeffs", "Perturbative energy coefficients of a center, or a pair's splitting (JSON)");
  std::string co_in, co_sigma, co_sigma1, co_sigma2, co_out;
  int co_order = 3;
  coeffs->add_option("input", co_in, "Instance JSON path")->required();
  auto* co_s = coeffs->add_option("--sigma", co_sigma, "Assignment bitstring (series mode)");
  auto* co_s1 = coeffs->add_option("--sigma1", co_sigma1, "First solution (splitting mode)");
  auto* co_s2 = coeffs->add_option("--sigma2", co_sigma2, "Second solution (splitting mode)");
  coeffs->add_option("--order", co_order, "Truncation order (1..3)");
  coeffs->add_option("--out", co_out, "Output path (default: stdout)");
  co_s->excludes(co_s1)->excludes(co_s2);
  co_s1->needs(co_s2);
  co_s2->needs(co_s1);

  // --- tunnel --------------------------------------------------------------
  auto* tunnel = app.add_subcommand("tunnel", "Tunneling amplitude between two solutions (JSON)");
  std::string tu_in, tu_sigma1, tu_sigma2, tu_method = "auto", tu_out;
  double tu_samples = 200000;
  std::uint64_t tu_seed = 1;
  tunnel->add_option("input", tu_in, "Instance JSON path")->required();
  tunnel->add_option("--sigma1", tu_sigma1, "Anchor solution bitstring")->required();
  tunnel->add_option("--sigma2", tu_sigma2, "Target solution bitstring")->required();
  tunnel->add_option("--method", tu_method, "dp | mc | auto (dp up to distance 24)")
      ->check(CLI::IsMember({"dp", "mc", "auto"}));
  tunnel->add_option("--samples", tu_samples, "Monte Carlo path count");
  tunnel->add_option("--seed", tu_seed, "Monte Carlo seed (beats GAPLAB_SEED)");
  tunnel->add_option("--out", tu_out, "Output path (default: stdout)");

  // --- diag ----------------------------------------------------------------
  auto* diag = app.add_subcommand(
      "diag", "Exact low spectrum: gap curve over a lambda grid (CSV) or min-gap scan (JSON)");
  std::string di_in, di_method = "auto", di_out;
  double di_lmin = 0.0, di_lmax = 1.0, di_tol = 1e-6;
  int di_points = 33;
  bool di_scan = false;
  diag->add_option("input", di_in, "Instance JSON path")->required();
  diag->add_option("--lambda-min", di_lmin, "Grid start");
  diag->add_option("--lambda-max", di_lmax, "Grid end");
  diag->add_option("--points", di_points, "Grid size");
  diag->add_option("--method", di_method, "auto | dense | iterative")
      ->check(CLI::IsMember({"auto", "dense", "iterative"}));
  diag->add_flag("--scan-min", di_scan, "Refine the minimum gap location instead of a curve");
  diag->add_option("--tol", di_tol, "Bracket width for --scan-min");
  diag->add_option("--out", di_out, "Output path (default: stdout)");

  // --- xing ----------------------------------------------------------------
  auto* xing = app.add_subcommand(
      "xing", "Append one clause to engineer an anti-crossing between a solution pair (JSON)");
  std::string xi_in, xi_out;
  double xi_budget = 1e6, xi_lref = 0.0, xi_tol = 1e-6, xi_mc_samples = 200000;
  int xi_order = 2, xi_min_distance = 3, xi_points = 33, xi_favored = 0;
  std::uint64_t xi_seed = 1;
  bool xi_no_exact = false;
  xing->add_option("input", xi_in, "Instance JSON path (the pair-stage instance)")->required();
  xing->add_option("--budget", xi_budget, "Search node budget for solution enumeration");
  xing->add_option("--min-distance", xi_min_distance, "Minimum pair Hamming distance");
  xing->add_option("--order", xi_order, "Series truncation order (1..3)");
  xing->add_option("--lambda-ref", xi_lref, "Reference lambda for the favored-solution decision");
  xing->add_option("--tol", xi_tol, "Bisection width for lambda_c");
  xing->add_option("--curve-points", xi_points, "Grid size for the emitted curves");
  xing->add_option("--mc-samples", xi_mc_samples, "Monte Carlo paths when distance > 24");
  xing->add_option("--seed", xi_seed, "Monte Carlo seed (beats GAPLAB_SEED)");
  xing->add_option("--favored", xi_favored, "Force the penalized solution: 1 or 2 (0 = auto)");
  xing->add_flag("--no-exact", xi_no_exact, "Skip the exact-spectrum cross-check");
  xing->add_option("--out", xi_out, "Output path (default: stdout)");

  // --- stats ---------------------------------------------------------------
  auto* stats = app.add_subcommand(
      "stats", "Splitting-statistics sweep over N: CSV table plus fit summary JSON");
  std::string st_config, st_out_csv, st_out_json;
  int st_jobs = 1;
  stats->add_option("--config", st_config, "Sweep config JSON path")->required();
  stats->add_option("--out-csv", st_out_csv, "CSV output path")->required();
  stats->add_option("--out-json", st_out_json, "Fit summary JSON output path")->required();
  stats->add_option("--jobs", st_jobs, "Worker threads (does not affect results)");

  // --- estimate ------------------------------------------------------------
  auto* estimate = app.add_subcommand(
      "estimate", "Closed-form scales: lambda*, minimum-gap law, lambda_cr, adiabatic time");
  int es_n = 0;
  double es_alpha = 0.62, es_f2 = 0.18, es_n0 = 1.0, es_a = 1.0, es_eps = 0.1;
  std::string es_out;
  estimate->add_option("--n", es_n, "Number of bits")->required();
  estimate->add_option("--alpha", es_alpha, "Clause ratio");
  estimate->add_option("--f2", es_f2, "Second-order splitting scale");
  estimate->add_option("--n0", es_n0, "Gap-law reference size");
  estimate->add_option("--a", es_a, "Tunneling prefactor");
  estimate->add_option("--eps", es_eps, "Adiabatic accuracy parameter");
  estimate->add_option("--out", es_out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      const std::uint64_t seed = resolve_seed(*gen, "--seed", gen_seed, 1);
      long long m = 0;
      if (gen->count("--m") > 0)
        m = as_count(gen_m, "--m");
      else if (gen->count("--alpha") > 0)
        m = std::llround(gen_alpha * gen_n);
      else
        throw gaplab::InvalidParameterError("provide --m or --alpha");
      const gaplab::Instance inst = gaplab::generate_instance(gen_n, int(m), seed);
      emit(gen_out, gaplab::instance_to_json(inst),
           make_manifest("gen", {{"n", gen_n},
                                 {"m", m},
                                 {"seed", seed},
                                 {"out", gen_out}}));
    } else if (solve->parsed()) {
      const gaplab::Instance inst = gaplab::instance_from_json(gaplab::read_file(solve_in));
      const auto set =
          gaplab::enumerate_solutions(inst, std::uint64_t(as_count(solve_budget, "--budget")));
      emit(solve_out, gaplab::solution_set_to_json(set),
           make_manifest("solve", {{"input", solve_in},
                                   {"budget", solve_budget},
                                   {"out", solve_out}}));
    } else if (coeffs->parsed()) {
      const gaplab::Instance inst = gaplab::instance_from_json(gaplab::read_file(co_in));
      std::string payload;
      if (coeffs->count("--sigma") > 0) {
        const auto center = gaplab::Assignment::from_string(co_sigma);
        payload = gaplab::series_to_json(gaplab::series_coefficients(inst, center, co_order));
      } else if (coeffs->count("--sigma1") > 0) {
        const auto s1 = gaplab::Assignment::from_string(co_sigma1);
        const auto s2 = gaplab::Assignment::from_string(co_sigma2);
        const gaplab::SolutionPair pair{s1, s2, gaplab::hamming_distance(s1, s2)};
        payload = gaplab::splitting_to_json(gaplab::splitting(inst, pair, co_order));
      } else {
        std::cerr << "coeffs: provide --sigma or --sigma1/--sigma2\n";
        return 2;
      }
      emit(co_out, payload,
           make_manifest("coeffs", {{"input", co_in},
                                    {"sigma", co_sigma},
                                    {"sigma1", co_sigma1},
                                    {"sigma2", co_sigma2},
                                    {"order", co_order},
                                    {"out", co_out}}));
    } else if (tunnel->parsed()) {
      const gaplab::Instance inst = gaplab::instance_from_json(gaplab::read_file(tu_in));
      const auto s1 = gaplab::Assignment::from_string(tu_sigma1);
      const auto s2 = gaplab::Assignment::from_string(tu_sigma2);
      const gaplab::SolutionPair pair{s1, s2, gaplab::hamming_distance(s1, s2)};
      const std::uint64_t seed = resolve_seed(*tunnel, "--seed", tu_seed, 1);
      const long long samples = as_count(tu_samples, "--samples");
      gaplab::TunnelingAmplitude amp;
      if (tu_method == "dp" || (tu_method == "auto" && pair.distance <= 24))
        amp = gaplab::tunneling_dp(inst, pair);
      else
        amp = gaplab::tunneling_mc(inst, pair, samples, seed);
      emit(tu_out, gaplab::tunneling_to_json(amp),
           make_manifest("tunnel", {{"input", tu_in},
                                    {"sigma1", tu_sigma1},
                                    {"sigma2", tu_sigma2},
                                    {"method", tu_method},
                                    {"samples", samples},
                                    {"seed", seed},
                                    {"out", tu_out}}));
    } else if (diag->parsed()) {
      const gaplab::Instance inst = gaplab::instance_from_json(gaplab::read_file(di_in));
      const gaplab::EigMethod method = parse_method(di_method);
      const ordered_json manifest =
          make_manifest("diag", {{"input", di_in},
                                 {"lambda_min", di_lmin},
                                 {"lambda_max", di_lmax},
                                 {"points", di_points},
                                 {"method", di_method},
                                 {"scan_min", di_scan},
                                 {"tol", di_tol},
                                 {"out", di_out}});
      if (di_scan) {
        const auto scan = gaplab::min_gap_scan(inst, di_lmin, di_lmax, di_tol, method);
        ordered_json j;
        j["lambda_min"] = scan.lambda_min;
        j["gap_min"] = scan.gap_min;
        emit(di_out, j.dump(2) + "\n", manifest);
      } else {
        if (di_points < 2) throw gaplab::InvalidParameterError("--points must be at least 2");
        std::vector<double> grid;
        for (int i = 0; i < di_points; ++i)
          grid.push_back(di_lmin + (di_lmax - di_lmin) * double(i) / double(di_points - 1));
        emit(di_out, gaplab::gap_curve_to_csv(gaplab::gap_curve(inst, grid, method)), manifest);
      }
    } else if (xing->parsed()) {
      const gaplab::Instance inst = gaplab::instance_from_json(gaplab::read_file(xi_in));
      const auto set =
          gaplab::enumerate_solutions(inst, std::uint64_t(as_count(xi_budget, "--budget")));
      const auto pair = gaplab::select_pair(set, xi_min_distance);
      if (!pair)
        throw gaplab::InvalidParameterError("no solution pair at the requested distance");
      gaplab::CrossingOptions opts;
      opts.max_order = xi_order;
      opts.lambda_ref_override = xi_lref;
      opts.tol = xi_tol;
      opts.curve_points = xi_points;
      opts.mc_samples = std::uint64_t(as_count(xi_mc_samples, "--mc-samples"));
      opts.mc_seed = resolve_seed(*xing, "--seed", xi_seed, 1);
      opts.exact_block = !xi_no_exact;
      opts.favored_override = xi_favored;
      const gaplab::CrossingBuild build = gaplab::build_anticrossing(inst, *pair, opts);
      ordered_json j;
      j["status"] = status_name(build.status);
      if (build.report)
        j["report"] = gaplab::crossing_to_json(*build.report);
      else
        j["report"] = nullptr;
      if (build.status == gaplab::CrossingStatus::kSeriesFailure) {
        j["error_kind"] = build.error_kind;
        j["error_message"] = build.error_message;
      }
      emit(xi_out, j.dump(2) + "\n",
           make_manifest("xing", {{"input", xi_in},
                                  {"budget", xi_budget},
                                  {"min_distance", xi_min_distance},
                                  {"order", xi_order},
                                  {"lambda_ref", xi_lref},
                                  {"tol", xi_tol},
                                  {"curve_points", xi_points},
                                  {"mc_samples", xi_mc_samples},
                                  {"seed", opts.mc_seed},
                                  {"favored", xi_favored},
                                  {"no_exact", xi_no_exact},
                                  {"out", xi_out}}));
      if (build.status != gaplab::CrossingStatus::kOk) {
        std::cerr << "xing: " << status_name(build.status);
        if (!build.error_message.empty()) std::cerr << " (" << build.error_message << ")";
        std::cerr << "\n";
        return 1;
      }
    } else if (stats->parsed()) {
      if (st_jobs < 1) throw gaplab::InvalidParameterError("--jobs must be positive");
      const auto config_json = nlohmann::json::parse(gaplab::read_file(st_config), nullptr, true);
      const gaplab::SweepConfig config = gaplab::sweep_config_from_json(config_json);
      const gaplab::SweepResult result = gaplab::splitting_sweep(config, st_jobs);
      // The manifest omits --jobs: worker count never changes the results.
      const ordered_json manifest =
          make_manifest("stats", {{"config", gaplab::sweep_config_to_json(config)},
                                  {"out_csv", st_out_csv},
                                  {"out_json", st_out_json}});
      gaplab::emit_report(result, st_out_csv, gaplab::ReportFormat::kCsv);
      gaplab::atomic_write_file(st_out_csv + ".manifest.json", manifest.dump(2) + "\n");
      gaplab::emit_report(result, st_out_json, gaplab::ReportFormat::kJson);
      gaplab::atomic_write_file(st_out_json + ".manifest.json", manifest.dump(2) + "\n");
    } else if (estimate->parsed()) {
      const gaplab::GapEstimate g = gaplab::min_gap_estimate(es_n, es_alpha, es_n0, es_a, es_f2);
      ordered_json j = ordered_json::parse(gaplab::gap_estimate_to_json(g));
      j["lambda_cr"] = es_n >= 3 ? ordered_json(gaplab::lambda_cr_estimate(es_n))
                                 : ordered_json(nullptr);
      j["epsilon"] = es_eps;
      j["t_adiabatic"] = g.delta_min > 0.0
                             ? ordered_json(gaplab::adiabatic_time_estimate(g.delta_min, es_eps))
                             : ordered_json(nullptr);
      emit(es_out, j.dump(2) + "\n",
           make_manifest("estimate", {{"n", es_n},
                                      {"alpha", es_alpha},
                                      {"f2", es_f2},
                                      {"n0", es_n0},
                                      {"a", es_a},
                                      {"eps", es_eps},
                                      {"out", es_out}}));
    }
  } catch (const gaplab::GaplabError& e) {
    std::cerr << e.what() << "\n";  // "<kind>: <message>"
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
