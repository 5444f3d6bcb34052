#include "blowup/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace blowup {

IntegratorOptions IntegratorOverrides::resolve(const ConeParams& cone) const {
  IntegratorOptions o = default_options(cone);
  if (h_max) o.h_max = *h_max;
  if (eta) o.eta = *eta;
  if (r_blow) o.r_blow = *r_blow;
  if (t_end) o.t_end = *t_end;
  o.record_stride = record_stride;
  return o;
}

IntegratorOptions IntegratorOverrides::resolve(State z0, double t_end_default) const {
  IntegratorOptions o;
  o.h_max = h_max.value_or(1e-2);
  o.eta = eta.value_or(1e-3);
  o.r_blow = r_blow.value_or(1e6 * std::max(1.0, z0.norm()));
  o.t_end = t_end.value_or(t_end_default);
  o.record_stride = record_stride;
  return o;
}

void ExperimentConfig::validate() const {
  model.validate();
  if (replicates < 1) throw std::invalid_argument("experiment: replicates must be >= 1");
  if (x0_grid.empty()) throw std::invalid_argument("experiment: x0_grid is empty");
  if (!std::is_sorted(x0_grid.begin(), x0_grid.end()) ||
      std::adjacent_find(x0_grid.begin(), x0_grid.end()) != x0_grid.end()) {
    throw std::invalid_argument("experiment: x0_grid must be strictly ascending");
  }
  // ConeParams::make enforces x0 > x_star + c and the alpha range.
  for (double x0 : x0_grid) (void)ConeParams::make(model, alpha, c, x0);
  if (m < 2) throw std::invalid_argument("experiment: m must be >= 2");
  if (!(tol > 0.0)) throw std::invalid_argument("experiment: tol must be > 0");
  if (max_iter < 0) throw std::invalid_argument("experiment: max_iter must be >= 0");
  if (threads < 0) throw std::invalid_argument("experiment: threads must be >= 0");
}

Interval wilson_interval(int successes, int trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

bool MonteCarloReport::trend_ok() const {
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const MonteCarloPoint& a = points[i];
    const MonteCarloPoint& b = points[i + 1];
    if (b.p_hat < a.p_hat && b.ci.hi < a.ci.lo) return false;
  }
  return true;
}

int MonteCarloReport::inclusion_violations() const {
  int v = 0;
  for (const auto& p : points) v += p.inclusion_violations;
  return v;
}

int MonteCarloReport::time_bound_violations() const {
  int v = 0;
  for (const auto& p : points) v += p.time_bound_violations;
  return v;
}

ReplicateResult run_replicate(const ExperimentConfig& cfg, const ConeParams& cone,
                              const IntegratorOptions& opts, int replicate) {
  const auto start = std::chrono::steady_clock::now();
  ReplicateResult res;
  res.x0 = cone.x0;
  res.replicate = replicate;
  try {
    const NoisePath path =
        fork_replicate(cfg.master_seed, static_cast<std::uint64_t>(replicate), opts.t_end);
    res.seed = std::get<BrownianPath>(path).seed();

    const EventFlags flags = noise_events(path, cone, cfg.model.sigma, cfg.sup_depth);
    res.b1 = flags.b1;
    res.b2 = flags.b2;
    res.sup1 = flags.sup1;
    res.sup2 = flags.sup2;

    std::vector<double> blowups;
    const SegmentClassification scan = scan_segment(cfg.model, cone, path, cfg.m, opts);
    std::ostringstream errors;
    for (const PointClass& p : scan.points) {
      if (p.error) {
        errors << "scan y=" << p.y << ": " << p.message << "; ";
        continue;
      }
      if (p.tag != Tag::G) continue;
      res.lenient = true;
      res.witness = "scan";
      if (p.outcome == Outcome::BlowUp) blowups.push_back(p.outcome_time);
    }
    res.brackets = static_cast<int>(scan.brackets.size());

    bool g_witness = res.lenient;
    for (const Bracket& br : scan.brackets) {
      if (g_witness) break;
      const BisectionResult bis =
          bisect_exploding_point(cfg.model, cone, path, br, cfg.tol, cfg.max_iter, opts);
      res.bisection_iterations += bis.iterations;
      if (bis.resolved()) {
        g_witness = true;
        res.lenient = true;
        res.witness = "bisection";
        if (bis.record.outcome == Outcome::BlowUp) blowups.push_back(bis.record.outcome_time);
      } else if (bis.jump_certified) {
        ++res.jumps;
      } else if (bis.status == BisectionResult::Status::Converged) {
        res.lenient = true;
        if (res.witness.empty()) res.witness = "converged";
      }
    }
    if (res.witness.empty()) res.witness = "none";

    const double deadline = cfg.time_factor * cone.T;
    for (double t : blowups) {
      if (!res.blowup_time || t < *res.blowup_time) res.blowup_time = t;
      if (res.b1 && t > deadline) res.time_bound_violation = true;
    }
    res.strict = res.blowup_time && *res.blowup_time <= deadline;
    res.error = errors.str();
  } catch (const std::exception& e) {
    res.error = e.what();
    res.strict = res.lenient = false;
  }
  res.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

MonteCarloReport run_montecarlo(const ExperimentConfig& cfg) {
  cfg.validate();
  MonteCarloReport report;
  report.config = cfg;

  std::vector<ConeParams> cones;
  std::vector<IntegratorOptions> options;
  for (double x0 : cfg.x0_grid) {
    cones.push_back(ConeParams::make(cfg.model, cfg.alpha, cfg.c, x0));
    options.push_back(cfg.integrator.resolve(cones.back()));
  }

  const std::size_t per_x0 = static_cast<std::size_t>(cfg.replicates);
  const std::size_t total = per_x0 * cfg.x0_grid.size();
  report.replicates.resize(total);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t g = job / per_x0;
      const int r = static_cast<int>(job % per_x0);
      report.replicates[job] = run_replicate(cfg, cones[g], options[g], r);
    }
  };
  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, total));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t g = 0; g < cfg.x0_grid.size(); ++g) {
    MonteCarloPoint pt;
    pt.x0 = cfg.x0_grid[g];
    pt.T = cones[g].T;
    pt.n = cfg.replicates;
    double runtime = 0.0;
    for (std::size_t r = 0; r < per_x0; ++r) {
      const ReplicateResult& rr = report.replicates[g * per_x0 + r];
      pt.strict += rr.strict;
      pt.lenient += rr.lenient;
      pt.b1b2 += rr.b1 && rr.b2;
      pt.failures += !rr.error.empty();
      pt.inclusion_violations += rr.inclusion_violation();
      pt.time_bound_violations += rr.time_bound_violation;
      runtime += rr.runtime_s;
    }
    pt.p_hat = static_cast<double>(pt.lenient) / pt.n;
    pt.p_hat_strict = static_cast<double>(pt.strict) / pt.n;
    pt.ci = wilson_interval(pt.lenient, pt.n);
    pt.ci_strict = wilson_interval(pt.strict, pt.n);
    pt.freq_b1b2 = static_cast<double>(pt.b1b2) / pt.n;
    pt.mean_runtime_s = runtime / pt.n;
    report.points.push_back(pt);
  }
  return report;
}

double FlowCheckReport::ratio() const {
  if (discrepancy == 0.0) return discrepancy_half_eta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return discrepancy_half_eta / discrepancy;
}

namespace {

struct Composition {
  bool ok = true;
  std::string reason;
  State direct;
  State composed;
};

Composition compose_once(const ModelParams& params, const NoisePath& path, State z0,
                         double t_mid, double t_end, IntegratorOptions opts) {
  Composition c;
  opts.stop_on_exit = false;
  opts.t_start = 0.0;
  opts.t_end = t_end;
  const TrajectoryRecord direct = simulate(params, path, z0, opts);
  if (direct.outcome != Outcome::Survived) {
    c.ok = false;
    c.reason = "blow-up before t_end";
    return c;
  }
  c.direct = direct.samples.back().z;

  State mid = z0;
  if (t_mid > 0.0) {
    opts.t_end = t_mid;
    const TrajectoryRecord first = simulate(params, path, z0, opts);
    if (first.outcome != Outcome::Survived) {
      c.ok = false;
      c.reason = "blow-up before t_mid";
      return c;
    }
    mid = first.samples.back().z;
  }
  opts.t_start = t_mid;
  opts.t_end = t_end;
  const TrajectoryRecord second = simulate(params, path, mid, opts);
  if (second.outcome != Outcome::Survived) {
    c.ok = false;
    c.reason = "blow-up after the restart";
    return c;
  }
  c.composed = second.samples.back().z;
  return c;
}

double distance(State a, State b) { return std::hypot(a.x - b.x, a.y - b.y); }

// RMS distance over all pairs of points.
double pairwise_rms(const std::vector<State>& pts) {
  double sq = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = distance(pts[i], pts[j]);
      sq += d * d;
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : std::sqrt(sq / static_cast<double>(pairs));
}

}  // namespace

FlowCheckReport check_flow_property(const ModelParams& params, const NoisePath& path, State z0,
                                    const std::vector<double>& t_mids, double t_end, double tol,
                                    const IntegratorOptions& opts) {
  if (t_mids.empty()) throw std::invalid_argument("check_flow_property: no restart times");
  for (double t_mid : t_mids) {
    if (!(t_mid >= 0.0) || !(t_mid < t_end)) {
      throw std::invalid_argument("check_flow_property: need 0 <= t_mid < t_end");
    }
  }
  FlowCheckReport rep;
  rep.t_mids = t_mids;
  IntegratorOptions half = opts;
  half.eta *= 0.5;
  half.h_max *= 0.5;
  std::vector<State> coarse, fine;
  for (double t_mid : t_mids) {
    const Composition a = compose_once(params, path, z0, t_mid, t_end, opts);
    const Composition b = compose_once(params, path, z0, t_mid, t_end, half);
    if (!a.ok || !b.ok) {
      rep.comparable = false;
      rep.reason = "not comparable: " + (a.ok ? b.reason : a.reason);
      return rep;
    }
    if (coarse.empty()) {
      // halving the step must not move the direct endpoint by O(1)
      if (distance(a.direct, b.direct) > 0.1 * (1.0 + a.direct.norm())) {
        rep.comparable = false;
        rep.reason = "not comparable: direct endpoint unresolved at this step scale";
        return rep;
      }
      rep.direct = a.direct;
      rep.composed = a.composed;
      coarse.push_back(a.direct);
      fine.push_back(b.direct);
    }
    coarse.push_back(a.composed);
    fine.push_back(b.composed);
    rep.per_mid.push_back(distance(a.direct, a.composed));
    rep.per_mid_half_eta.push_back(distance(b.direct, b.composed));
  }
  rep.discrepancy = pairwise_rms(coarse);
  rep.discrepancy_half_eta = pairwise_rms(fine);
  rep.within_tol = rep.discrepancy <= tol;
  return rep;
}

std::vector<double> default_restart_times(double t_end, int count) {
  if (count < 1) throw std::invalid_argument("default_restart_times: count must be >= 1");
  std::vector<double> out;
  for (int i = 1; i <= count; ++i) out.push_back(t_end * i / (count + 1));
  return out;
}

LongrunSummary run_onepoint_longrun(const ModelParams& params, const NoisePath& path, State z0,
                                    double t_long, double burn_in, double stride,
                                    const IntegratorOptions& opts, double excursion_radius,
                                    double histogram_range) {
  if (!(params.sigma > 0.0)) throw std::invalid_argument("longrun: sigma must be > 0");
  if (!(t_long > 0.0) || !(burn_in >= 0.0) || !(burn_in < t_long)) {
    throw std::invalid_argument("longrun: need 0 <= burn_in < t_long");
  }
  if (!(stride > 0.0) || stride > t_long) {
    throw std::invalid_argument("longrun: stride must lie in (0, t_long]");
  }
  LongrunSummary s;
  s.t_long = t_long;
  s.burn_in = burn_in;
  s.stride = stride;
  s.excursion_radius = excursion_radius;
  s.histogram.range = histogram_range;
  s.histogram.counts.assign(static_cast<std::size_t>(s.histogram.bins * s.histogram.bins), 0);
  s.min_step = std::numeric_limits<double>::infinity();

  IntegratorOptions run_opts = opts;
  run_opts.stop_on_exit = false;
  run_opts.record_stride = 1;

  const double win_lo = t_long - 2.0 * burn_in;
  const double win_mid = t_long - burn_in;
  std::array<double, 2> win_sum{};
  std::array<std::size_t, 2> win_n{};
  double sum_x = 0.0, sum_y = 0.0, sum_xx = 0.0, sum_yy = 0.0, sum_r = 0.0;

  State z = z0;
  bool outside = z.norm() > excursion_radius;
  s.max_radius = z.norm();
  s.samples.push_back({0.0, z});
  const auto n_chunks = static_cast<std::size_t>(std::ceil(t_long / stride - 1e-9));
  for (std::size_t k = 0; k < n_chunks; ++k) {
    run_opts.t_start = stride * static_cast<double>(k);
    run_opts.t_end = std::min(t_long, stride * static_cast<double>(k + 1));
    const TrajectoryRecord rec = simulate(params, path, z, run_opts);
    s.steps += rec.steps;
    if (rec.steps > 0) s.min_step = std::min(s.min_step, rec.min_step);
    for (const Sample& p : rec.samples) {
      const double r = p.z.norm();
      s.max_radius = std::max(s.max_radius, r);
      const bool out = r > excursion_radius;
      if (out && !outside) ++s.excursions;
      outside = out;
    }
    if (rec.outcome == Outcome::BlowUp) {
      s.numerical_explosion = true;
      std::ostringstream d;
      d.precision(17);
      d << "numerical explosion at t=" << rec.outcome_time << (rec.overflow ? " (overflow)" : "")
        << "; last step sizes >= " << rec.min_step << "; last states:";
      const std::size_t from = rec.samples.size() > 5 ? rec.samples.size() - 5 : 0;
      for (std::size_t i = from; i < rec.samples.size(); ++i) {
        d << " (t=" << rec.samples[i].t << ", x=" << rec.samples[i].z.x
          << ", y=" << rec.samples[i].z.y << ")";
      }
      s.diagnostics = d.str();
      break;
    }
    z = rec.samples.back().z;
    const double t = run_opts.t_end;
    s.samples.push_back({t, z});
    if (t < burn_in) continue;

    ++s.n_stats;
    const double r = z.norm();
    sum_x += z.x;
    sum_y += z.y;
    sum_xx += z.x * z.x;
    sum_yy += z.y * z.y;
    sum_r += r;
    if (t > win_lo && t <= win_mid) {
      win_sum[0] += r;
      ++win_n[0];
    } else if (t > win_mid) {
      win_sum[1] += r;
      ++win_n[1];
    }
    Histogram2D& h = s.histogram;
    const double cell = 2.0 * h.range / h.bins;
    const double fx = std::floor((z.x + h.range) / cell);
    const double fy = std::floor((z.y + h.range) / cell);
    if (fx >= 0 && fx < h.bins && fy >= 0 && fy < h.bins) {
      ++h.counts[static_cast<std::size_t>(fy) * h.bins + static_cast<std::size_t>(fx)];
    } else {
      ++h.outside;
    }
  }
  if (!std::isfinite(s.min_step)) s.min_step = 0.0;
  if (s.n_stats > 0) {
    const double n = static_cast<double>(s.n_stats);
    s.mean_x = sum_x / n;
    s.mean_y = sum_y / n;
    s.var_x = sum_xx / n - s.mean_x * s.mean_x;
    s.var_y = sum_yy / n - s.mean_y * s.mean_y;
    s.mean_r = sum_r / n;
  }
  for (int i = 0; i < 2; ++i) {
    s.window_mean_r[i] = win_n[i] ? win_sum[i] / static_cast<double>(win_n[i]) : 0.0;
  }
  return s;
}

}  // namespace blowup
