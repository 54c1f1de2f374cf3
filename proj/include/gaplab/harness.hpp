#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaplab/instance.hpp"
#include "gaplab/perturbation.hpp"
#include "gaplab/solver.hpp"
#include "gaplab/tunneling.hpp"

namespace gaplab {

// ---------------------------------------------------------------------------
// Splitting statistics sweep
// ---------------------------------------------------------------------------

struct SweepConfig {
  std::vector<int> n_values;
  double alpha = 0.62;
  int samples_per_n = 100;
  std::uint64_t master_seed = 1;
  int max_order = 3;
  int min_pair_distance = 7;  // must exceed 2 * max_order
  std::uint64_t node_budget = 20000;
};

nlohmann::ordered_json sweep_config_to_json(const SweepConfig& c);
SweepConfig sweep_config_from_json(const nlohmann::json& j);

// Instances that produced no usable sample, by cause. "budget" covers
// enumerations that hit the node budget without yielding a qualifying pair;
// "resonant" covers series computations that failed (degenerate
// neighborhoods and kin).
struct DiscardCounts {
  long long unsat = 0;
  long long budget = 0;
  long long no_pair = 0;
  long long resonant = 0;

  long long total() const { return unsat + budget + no_pair + resonant; }
};

struct SweepResult {
  SweepConfig config;
  // sq[n_idx][m-1] = squared splitting coefficients (F^(m)_{1,2})^2 of the
  // kept samples, in sample order.
  std::vector<std::vector<std::vector<double>>> sq;
  std::vector<DiscardCounts> discards;  // per n_idx

  long long used(int n_idx) const;
  double mean_sq(int n_idx, int m) const;
  double stderr_sq(int n_idx, int m) const;  // standard error of the mean
  double median_sq(int n_idx, int m) const;
};

// Deterministic per (config, master_seed): every (N, sample) cell derives its
// own generator, failures are counted rather than resampled, and reduction
// happens in sample order, so results are identical for any worker count.
SweepResult splitting_sweep(const SweepConfig& config, int jobs = 1);

// ---------------------------------------------------------------------------
// Weighted least squares
// ---------------------------------------------------------------------------

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double weight = 1.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

FitResult linear_fit(const std::vector<FitPoint>& points);

// Weighted fit of mean squared splitting vs N for one order m >= 2; weights
// are inverse squared standard errors (unit weight where the error is zero).
FitResult sweep_fit(const SweepResult& result, int m);

// ---------------------------------------------------------------------------
// Engineered anti-crossing construction
// ---------------------------------------------------------------------------

struct CrossingOptions {
  int max_order = 2;             // truncation for the final series
  double f2_reference = 0.18;    // feeds the default lambda_ref
  double lambda_ref_override = 0.0;  // > 0 replaces the default reference
  double bracket_hi = 0.0;           // > 0 replaces the expanding bracket
  double tol = 1e-6;             // bisection width for lambda_c
  int curve_points = 33;         // grid size for the emitted curves
  std::uint64_t mc_samples = 200000;  // Monte Carlo paths when n > 24
  std::uint64_t mc_seed = 1;
  bool exact_block = true;       // run the exact-spectrum cross-check (N <= 12)
  int favored_override = 0;      // 0 auto, 1 forces sigma1, 2 forces sigma2
  double overlap_delta = 0.2;    // overlaps probed at lambda_min * (1 +/- delta)
};

enum class CrossingStatus {
  kOk,
  kNoDistinguishingClause,  // no clause penalizes the favored solution only
  kNoCrossingInBracket,     // truncated curves never reorder below the cap
  kSeriesFailure,           // degenerate neighborhood / resonance propagated
};

struct CrossingReport {
  Instance base_instance;   // the M-1 clause instance the pair solves
  Instance final_instance;  // base plus the added clause
  Clause added{1, 2, 3};
  int penalty = 0;          // added-clause cost at sigma2 (1 or 4)

  Assignment sigma1;        // kept: still a solution of final_instance
  Assignment sigma2;        // favored by PT before the append; cost = penalty
  int distance = 0;         // Hamming distance n
  int decision_order = 0;   // truncation used to pick the favored solution
  double lambda_ref = 0.0;

  SeriesCoefficients series1, series2;  // under final_instance
  double lambda_c = 0.0;
  std::vector<double> curve_lambdas, curve_e1, curve_e2;

  TunnelingAmplitude v12;        // under base_instance (both states cost 0)
  double v12_at_lambda_c = 0.0;  // |c| * lambda_c^n
  double gap_band_lo = 0.0;      // 1x and 2x the tunneling amplitude
  double gap_band_hi = 0.0;

  // Exact cross-check, filled for N <= 12. Overlaps are squared amplitudes
  // of sigma1/sigma2 in the two lowest eigenstates, probed on both sides of
  // the exact gap minimum at lambda_min_exact * (1 -/+ overlap_delta).
  bool has_exact = false;
  double lambda_min_exact = 0.0;
  double delta_min_exact = 0.0;
  double kappa = 0.0;       // delta_min_exact / v12_at_lambda_c
  double overlap1_before = 0.0, overlap2_before = 0.0;      // ground state
  double overlap1_after = 0.0, overlap2_after = 0.0;
  double overlap1_x_before = 0.0, overlap2_x_before = 0.0;  // first excited
  double overlap1_x_after = 0.0, overlap2_x_after = 0.0;
  // At these sizes the ground state past the crossing heads toward the
  // delocalized branch rather than re-pinning on sigma2 outright, so the
  // swap is judged by where each classical character lives: before the
  // minimum the ground state carries sigma1 and the excited state carries
  // sigma2; after it the sigma1 weight has migrated to the excited state.
  bool swap_ok = false;
};

struct CrossingBuild {
  CrossingStatus status = CrossingStatus::kSeriesFailure;
  std::optional<CrossingReport> report;
  std::string error_kind;     // filled for kSeriesFailure
  std::string error_message;  // filled for kSeriesFailure
};

// Append-one-clause protocol: decide the PT-favored solution of the pair at
// lambda_ref, penalize it with the first distinguishing clause, recompute
// both truncated series under the extended instance, and locate the curve
// crossing. The pair must solve base at distance >= 3.
CrossingBuild build_anticrossing(const Instance& base, const SolutionPair& pair,
                                 const CrossingOptions& opts);

// Bisection for eval(a, lambda) - eval(b, lambda) = 0 on [lo, hi] to width
// <= tol; none when the difference does not change sign on the bracket.
std::optional<double> locate_crossing(const SeriesCoefficients& a, const SeriesCoefficients& b,
                                      double lo, double hi, double tol);

// T = 1 / (epsilon * delta^2); delta > 0, epsilon in (0, 1).
double adiabatic_time_estimate(double delta, double epsilon);

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

enum class ReportFormat { kCsv, kJson };

// CSV schema "N,m,mean_sq_split,stderr,samples,discarded": one row per
// (N, m) with m = 1..max_order; "discarded" is the N's total discard count.
std::string sweep_to_csv(const SweepResult& result);

// Summary JSON: per-N means/medians/standard errors, discard breakdown, and
// the weighted fits (slope, sqrt-slope) for every m >= 2.
nlohmann::ordered_json sweep_fit_to_json(const SweepResult& result);

nlohmann::ordered_json fit_to_json(const FitResult& fit);

// Full report including both instances, series, curves, tunneling data and
// the exact-spectrum block; revalidates the report invariants first.
nlohmann::ordered_json crossing_to_json(const CrossingReport& report);

// Crossing curves as "lambda,e1_series,e2_series" rows.
std::string crossing_curve_to_csv(const CrossingReport& report);

// Atomic file emission. Supported combinations: sweep with kCsv (table) or
// kJson (fit summary); crossing with kJson (report) or kCsv (curves); fit
// with kJson. Anything else is invalid-parameter.
void emit_report(const SweepResult& result, const std::string& path, ReportFormat format);
void emit_report(const CrossingReport& report, const std::string& path, ReportFormat format);
void emit_report(const FitResult& fit, const std::string& path, ReportFormat format);

}  // namespace gaplab
