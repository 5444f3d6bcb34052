#include "blowup/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace blowup {

void IntegratorOptions::validate(State z0, double noise_horizon) const {
  if (!(h_max > 0.0) || !std::isfinite(h_max)) {
    throw std::invalid_argument("options: h_max must be positive and finite");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("options: eta must be positive and finite");
  }
  if (!(r_blow > 0.0) || !std::isfinite(r_blow)) {
    throw std::invalid_argument("options: r_blow must be positive and finite");
  }
  // Restarts (t_start > 0) continue an existing trajectory and may begin far
  // from the origin; only fresh runs are held to the 1e3 * |x0| margin.
  if (t_start == 0.0 && r_blow < 1e3 * std::abs(z0.x)) {
    throw std::invalid_argument("options: r_blow must be >= 1e3 * |x0|");
  }
  if (!(t_start >= 0.0) || !(t_end > t_start) || !std::isfinite(t_end)) {
    throw std::invalid_argument("options: need 0 <= t_start < t_end < inf");
  }
  if (t_end > noise_horizon) {
    throw std::invalid_argument("options: t_end = " + std::to_string(t_end) +
                                " exceeds the noise horizon " + std::to_string(noise_horizon));
  }
  if (record_stride < 1) throw std::invalid_argument("options: record_stride must be >= 1");
}

IntegratorOptions default_options(const ConeParams& cone) {
  IntegratorOptions o;
  o.h_max = cone.T / 1000.0;
  o.eta = 1e-3;
  o.r_blow = 1e6 * cone.x0;
  o.t_start = 0.0;
  o.t_end = 2.0 * cone.T;
  return o;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::ExitUpper: return "ExitUpper";
    case Outcome::ExitLower: return "ExitLower";
    case Outcome::BlowUp: return "BlowUp";
    case Outcome::Survived: return "Survived";
  }
  return "?";
}

std::optional<double> EventTimes::tau() const {
  if (tau_upper && tau_lower) return std::min(*tau_upper, *tau_lower);
  return tau_upper ? tau_upper : tau_lower;
}

double gronwall_floor(const ConeParams& cone, double t) {
  if (!(t >= 0.0) || !(t < cone.T)) {
    throw std::domain_error("gronwall_floor: t must lie in [0, T)");
  }
  const int m = cone.n - 1;
  const double denom = 1.0 - 0.5 * cone.epsilon * m * std::pow(cone.x1, m) * t;
  return cone.x1 / std::pow(denom, 1.0 / m);
}

namespace {

// Signed distances whose sign change marks each event: tau_upper, tau_lower,
// nu_plus, nu_minus.
std::array<double, 4> event_levels(const ConeParams& cone, State z) {
  const double half = 0.5 * cone.alpha * cone.x1;
  return {z.y - cone.alpha * z.x, -z.y - cone.alpha * z.x, z.y - half, -z.y - half};
}

std::optional<double>& event_slot(EventTimes& ev, int i) {
  switch (i) {
    case 0: return ev.tau_upper;
    case 1: return ev.tau_lower;
    case 2: return ev.nu_plus;
    default: return ev.nu_minus;
  }
}

TrajectoryRecord run(const ModelParams& params, const ConeParams* cone, const NoisePath& path,
                     State z0, const IntegratorOptions& opts) {
  params.validate();
  if (!z0.finite()) throw std::invalid_argument("simulate: initial state must be finite");
  opts.validate(z0, horizon(path));
  if (opts.stop_on_exit && cone == nullptr) {
    throw std::invalid_argument("simulate: stop_on_exit needs cone parameters");
  }

  TrajectoryRecord rec;
  rec.initial = z0;
  rec.min_step = std::numeric_limits<double>::infinity();

  NoiseSampler noise(path);
  const bool noisy = params.sigma != 0.0;
  double t = opts.t_start;
  State z = z0;
  double w1 = noisy ? noise(1, t) : 0.0;
  double w2 = noisy ? noise(2, t) : 0.0;
  rec.samples.push_back({t, z});

  std::array<double, 4> levels{};
  if (cone != nullptr) {
    levels = event_levels(*cone, z);
    for (int i = 0; i < 4; ++i) {
      if (levels[i] >= 0.0) event_slot(rec.events, i) = t;
    }
    if (opts.stop_on_exit && (rec.events.tau_upper || rec.events.tau_lower)) {
      rec.outcome = rec.events.tau_upper ? Outcome::ExitUpper : Outcome::ExitLower;
      rec.outcome_time = t;
      return rec;
    }
  }
  if (z.norm() >= opts.r_blow) {
    rec.outcome = Outcome::BlowUp;
    rec.outcome_time = t;
    return rec;
  }

  while (true) {
    if (t >= opts.t_end) {
      rec.outcome = Outcome::Survived;
      rec.outcome_time = t;
      break;
    }
    const Vec2 b = drift_binomial(params, z);
    if (b.overflow()) {
      rec.outcome = Outcome::BlowUp;
      rec.outcome_time = t;
      rec.overflow = true;
      break;
    }
    const double r = z.norm();
    const double budget = opts.eta * (1.0 + r);
    double h = std::min(opts.h_max, budget / (1.0 + std::pow(r, params.n)));
    double t_next = t + h;
    if (t_next >= opts.t_end) {
      t_next = opts.t_end;
      h = t_next - t;
    }
    if (!(t_next > t)) {
      // The step fell below the resolution of t: the state is diverging
      // faster than time can be represented.
      rec.outcome = Outcome::BlowUp;
      rec.outcome_time = t;
      rec.overflow = true;
      break;
    }

    State next{z.x + b.x * h, z.y + b.y * h};
    if (noisy) {
      const double w1n = noise(1, t_next);
      const double w2n = noise(2, t_next);
      next.x += params.sigma * (w1n - w1);
      next.y += params.sigma * (w2n - w2);
      w1 = w1n;
      w2 = w2n;
    }
    ++rec.steps;
    rec.min_step = std::min(rec.min_step, h);
    rec.max_budget_ratio = std::max(rec.max_budget_ratio, std::hypot(b.x, b.y) * h / budget);

    if (!next.finite()) {
      rec.outcome = Outcome::BlowUp;
      rec.outcome_time = t;
      rec.overflow = true;
      break;
    }

    // Crossings inside this step, then the earliest stopping event.
    std::array<std::optional<double>, 4> crossed{};
    if (cone != nullptr) {
      const std::array<double, 4> next_levels = event_levels(*cone, next);
      for (int i = 0; i < 4; ++i) {
        if (!event_slot(rec.events, i) && levels[i] < 0.0 && next_levels[i] >= 0.0) {
          crossed[i] = t + h * (-levels[i]) / (next_levels[i] - levels[i]);
        }
      }
      levels = next_levels;
    }
    std::optional<double> stop_time;
    Outcome stop_outcome = Outcome::Survived;
    const auto consider = [&](std::optional<double> when, Outcome o) {
      if (when && (!stop_time || *when < *stop_time)) {
        stop_time = when;
        stop_outcome = o;
      }
    };
    if (opts.stop_on_exit) {
      consider(crossed[0], Outcome::ExitUpper);
      consider(crossed[1], Outcome::ExitLower);
    }
    const double r_next = next.norm();
    if (r_next >= opts.r_blow) {
      consider(t + h * (opts.r_blow - r) / (r_next - r), Outcome::BlowUp);
    }
    for (int i = 0; i < 4; ++i) {
      if (crossed[i] && (!stop_time || *crossed[i] <= *stop_time)) {
        event_slot(rec.events, i) = crossed[i];
      }
    }

    t = t_next;
    z = next;
    if (stop_time) {
      rec.samples.push_back({t, z});
      rec.outcome = stop_outcome;
      rec.outcome_time = *stop_time;
      break;
    }
    if (rec.steps % static_cast<std::size_t>(opts.record_stride) == 0 || t >= opts.t_end) {
      rec.samples.push_back({t, z});
    }
  }
  if (rec.steps == 0) rec.min_step = 0.0;
  return rec;
}

}  // namespace

TrajectoryRecord simulate(const ModelParams& params, const ConeParams& cone,
                          const NoisePath& path, State z0, const IntegratorOptions& opts) {
  return run(params, &cone, path, z0, opts);
}

TrajectoryRecord simulate(const ModelParams& params, const NoisePath& path, State z0,
                          const IntegratorOptions& opts) {
  return run(params, nullptr, path, z0, opts);
}

}  // namespace blowup
