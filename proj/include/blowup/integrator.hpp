#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "blowup/drift.hpp"
#include "blowup/noise.hpp"

namespace blowup {

/// Step control and stopping rules for simulate().
///
/// The step is h = min(h_max, eta (1 + |z|) / (1 + |z|^n)), so the drift
/// increment per step stays below eta (1 + |z|): a relative budget that keeps
/// the step count to the blow-up radius proportional to log(r_blow / |z0|) / eta.
struct IntegratorOptions {
  double h_max = 1e-3;
  double eta = 1e-3;
  double r_blow = 1e6;
  double t_start = 0.0;
  double t_end = 1.0;
  int record_stride = 1;
  /// Stop at the first crossing of y = +-alpha x (needs a cone).
  bool stop_on_exit = false;

  /// Throws std::invalid_argument on non-positive h_max/eta, r_blow < 1e3 |x0|
  /// (fresh runs with t_start = 0 only),
  /// t_end <= t_start, or a noise horizon shorter than t_end.
  void validate(State z0, double noise_horizon) const;
};

/// h_max = T / 1000, eta = 1e-3, r_blow = 1e6 x0, t_end = 2 T.
[[nodiscard]] IntegratorOptions default_options(const ConeParams& cone);

enum class Outcome { ExitUpper, ExitLower, BlowUp, Survived };

[[nodiscard]] std::string_view to_string(Outcome o);

/// First hitting times; empty when the threshold was never reached.
struct EventTimes {
  std::optional<double> tau_upper;  // y >= alpha x
  std::optional<double> tau_lower;  // y <= -alpha x
  std::optional<double> nu_plus;    // y >= (alpha / 2) x1
  std::optional<double> nu_minus;   // y <= -(alpha / 2) x1

  /// min(tau_upper, tau_lower) over the ones present.
  [[nodiscard]] std::optional<double> tau() const;
};

struct Sample {
  double t = 0.0;
  State z;
};

struct TrajectoryRecord {
  State initial;
  std::vector<Sample> samples;
  Outcome outcome = Outcome::Survived;
  double outcome_time = 0.0;
  /// BlowUp triggered by a non-finite state rather than by r_blow.
  bool overflow = false;
  EventTimes events;
  std::size_t steps = 0;
  /// max over steps of |b(z)| h / (eta (1 + |z|)).
  double max_budget_ratio = 0.0;
  double min_step = 0.0;
};

/// Euler-Maruyama for the cartesian system under the given noise path, with
/// cone event tracking. Events and the blow-up time are located by linear
/// interpolation inside the step that crosses them.
[[nodiscard]] TrajectoryRecord simulate(const ModelParams& params, const ConeParams& cone,
                                        const NoisePath& path, State z0,
                                        const IntegratorOptions& opts);

/// Same without a cone: no event times, stop_on_exit must be false.
[[nodiscard]] TrajectoryRecord simulate(const ModelParams& params, const NoisePath& path,
                                        State z0, const IntegratorOptions& opts);

/// (x0 - c) / (1 - (epsilon / 2)(n - 1)(x0 - c)^(n-1) t)^(1 / (n - 1)).
/// Throws std::domain_error outside [0, T).
[[nodiscard]] double gronwall_floor(const ConeParams& cone, double t);

}  // namespace blowup
