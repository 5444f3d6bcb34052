#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blowup/drift.hpp"
#include "blowup/flow.hpp"
#include "blowup/integrator.hpp"
#include "blowup/noise.hpp"

namespace blowup {

inline constexpr int kSchemaVersion = 1;

/// Optional replacements for the cone-derived integrator defaults.
struct IntegratorOverrides {
  std::optional<double> h_max;
  std::optional<double> eta;
  std::optional<double> r_blow;
  std::optional<double> t_end;
  int record_stride = 1;

  [[nodiscard]] IntegratorOptions resolve(const ConeParams& cone) const;
  /// For runs without a cone: h_max = 1e-2, eta = 1e-3,
  /// r_blow = 1e6 max(1, |z0|).
  [[nodiscard]] IntegratorOptions resolve(State z0, double t_end) const;
};

struct ExperimentConfig {
  ModelParams model;
  double alpha = 0.2;
  double c = 1.0;
  std::vector<double> x0_grid;
  int replicates = 100;
  std::uint64_t master_seed = 0;
  IntegratorOverrides integrator;
  int m = 65;
  double tol = 1e-10;
  int max_iter = 200;
  int sup_depth = kDefaultSupDepth;
  /// 0 means std::thread::hardware_concurrency().
  int threads = 0;
  /// Blow-up witnesses count as strict successes up to time_factor * T.
  double time_factor = 1.02;

  /// Throws std::invalid_argument: N >= 1, grid non-empty and ascending, every
  /// x0 > x_star + c.
  void validate() const;
};

struct ReplicateResult {
  double x0 = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  bool strict = false;   // blow-up witness by time_factor * T
  bool lenient = false;  // G point found, or a converged bracket with no certified jump
  bool b1 = false;
  bool b2 = false;
  double sup1 = 0.0;
  double sup2 = 0.0;
  std::optional<double> blowup_time;  // earliest blow-up witness
  std::string witness;                // "scan", "bisection", "converged" or "none"
  int brackets = 0;
  int jumps = 0;                      // brackets ending in a certified jump
  int bisection_iterations = 0;
  /// B1 held but some blow-up witness came later than time_factor * T.
  bool time_bound_violation = false;
  std::string error;
  double runtime_s = 0.0;

  /// B1 and B2 held yet no lenient success: contradicts the inclusion.
  [[nodiscard]] bool inclusion_violation() const { return b1 && b2 && !lenient; }
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for k successes out of n trials.
[[nodiscard]] Interval wilson_interval(int successes, int trials, double z = 1.959963984540054);

struct MonteCarloPoint {
  double x0 = 0.0;
  double T = 0.0;
  int n = 0;
  int strict = 0;
  int lenient = 0;
  int b1b2 = 0;
  int failures = 0;
  double p_hat = 0.0;         // lenient / n
  double p_hat_strict = 0.0;
  Interval ci;                // Wilson 95% for p_hat
  Interval ci_strict;
  double freq_b1b2 = 0.0;
  double mean_runtime_s = 0.0;
  int inclusion_violations = 0;
  int time_bound_violations = 0;
};

struct MonteCarloReport {
  ExperimentConfig config;
  std::vector<MonteCarloPoint> points;
  std::vector<ReplicateResult> replicates;  // ordered by (x0, replicate)

  /// Lenient p_hat non-decreasing along the grid up to Wilson interval overlap.
  [[nodiscard]] bool trend_ok() const;
  [[nodiscard]] int inclusion_violations() const;
  [[nodiscard]] int time_bound_violations() const;
};

/// One replicate at one x0: shared path fork_replicate(seed, r), noise flags,
/// segment scan, then bisection on each bracket until a G witness appears.
[[nodiscard]] ReplicateResult run_replicate(const ExperimentConfig& cfg, const ConeParams& cone,
                                            const IntegratorOptions& opts, int replicate);

/// All replicates for every x0, spread over a worker pool. Per-replicate
/// failures are recorded, never thrown.
[[nodiscard]] MonteCarloReport run_montecarlo(const ExperimentConfig& cfg);

struct FlowCheckReport {
  bool comparable = true;
  std::string reason;
  std::vector<double> t_mids;
  std::vector<double> per_mid;         // |direct - composed| per restart time
  std::vector<double> per_mid_half_eta;
  double discrepancy = 0.0;            // RMS pairwise distance of all flow evaluations
  double discrepancy_half_eta = 0.0;   // same with eta and h_max halved
  State direct;                        // endpoint of the run over [0, t_end]
  State composed;                      // endpoint via a restart at t_mids.front()
  [[nodiscard]] double ratio() const;
  [[nodiscard]] bool decreasing() const { return discrepancy_half_eta < discrepancy; }
  bool within_tol = false;
};

/// Evaluates phi_{0,t_end}(z0) directly and as phi_{s,t_end}(phi_{0,s}(z0)) for
/// each restart time s in t_mids, on one path, at the given step scale and at
/// half of it. The exact flow makes all evaluations coincide; their pairwise
/// spread averages out the grid-phase noise that a single |direct - composed|
/// carries. A run whose direct endpoint moves by O(1) under step halving is
/// reported as not comparable.
[[nodiscard]] FlowCheckReport check_flow_property(const ModelParams& params,
                                                  const NoisePath& path, State z0,
                                                  const std::vector<double>& t_mids,
                                                  double t_end, double tol,
                                                  const IntegratorOptions& opts);

/// `count` restart times evenly spaced inside (0, t_end).
[[nodiscard]] std::vector<double> default_restart_times(double t_end, int count = 32);

struct Histogram2D {
  double range = 10.0;  // bins cover [-range, range]^2
  int bins = 40;
  std::vector<std::uint64_t> counts;  // row-major, y rows
  std::uint64_t outside = 0;
};

struct LongrunSummary {
  double t_long = 0.0;
  double burn_in = 0.0;
  double stride = 0.0;
  bool numerical_explosion = false;
  std::string diagnostics;
  std::size_t steps = 0;
  double min_step = 0.0;
  double max_radius = 0.0;
  double excursion_radius = 0.0;
  int excursions = 0;                 // up-crossings of excursion_radius
  std::vector<Sample> samples;        // every `stride` time units
  std::size_t n_stats = 0;            // samples after burn-in
  double mean_x = 0.0, mean_y = 0.0, var_x = 0.0, var_y = 0.0, mean_r = 0.0;
  std::array<double, 2> window_mean_r{};  // mean |z| over the last two burn-in windows
  Histogram2D histogram;
};

/// Single trajectory over [0, t_long], sampled every `stride` time units by
/// restarting the integrator on the same path; statistics skip t < burn_in.
/// An r_blow crossing is reported, not thrown.
[[nodiscard]] LongrunSummary run_onepoint_longrun(const ModelParams& params,
                                                  const NoisePath& path, State z0,
                                                  double t_long, double burn_in, double stride,
                                                  const IntegratorOptions& opts,
                                                  double excursion_radius,
                                                  double histogram_range = 10.0);

}  // namespace blowup
