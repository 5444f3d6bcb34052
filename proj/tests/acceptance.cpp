// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "blowup/drift.hpp"
#include "blowup/experiments.hpp"
#include "blowup/flow.hpp"
#include "blowup/integrator.hpp"
#include "blowup/io.hpp"
#include "blowup/noise.hpp"

using namespace blowup;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

ModelParams model(int n, double sigma) {
  ModelParams p;
  p.n = n;
  p.sigma = sigma;
  return p;
}

ModelParams random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> un(2, 6), terms(0, 5);
  std::uniform_real_distribution<double> uc(-3.0, 3.0);
  ModelParams p = model(un(rng), 0.0);
  const int k = terms(rng);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> uj(0, p.n - 1);
    const int j = uj(rng);
    std::uniform_int_distribution<int> uk(0, p.n - 1 - j);
    p.f_coeffs[{j, uk(rng)}] = {uc(rng), uc(rng)};
  }
  return p;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict drift_equivalence() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> ux(1e-3, 1e3), uslope(-10.0, 10.0);
  double worst = 0.0;
  for (int f = 0; f < 20; ++f) {
    const ModelParams p = random_model(rng);
    const double s = p.coeff_l1();
    for (int i = 0; i < 5000; ++i) {
      const double x = ux(rng);
      const State z{x, uslope(rng) * x};
      const double r = z.norm();
      const double scale = std::pow(r, p.n) + s * std::pow(r, p.n - 1);
      const Vec2 a = drift_binomial(p, z);
      const Vec2 b = drift_polar(p, z);
      worst = std::max({worst, std::abs(a.x - b.x) / scale, std::abs(a.y - b.y) / scale});
    }
  }
  return {worst <= 1e-9, fmt("1e5 points, 20 models, max rel err %.3g", worst)};
}

Verdict blowup_oracle() {
  IntegratorOptions o;
  o.h_max = 1e-2;
  o.eta = 1e-3;
  o.r_blow = 1e8;
  o.t_end = 1.0;
  const TrajectoryRecord rec = simulate(model(2, 0.0), ZeroPath{}, {10.0, 0.0}, o);
  const bool ok = rec.outcome == Outcome::BlowUp && rec.outcome_time >= 0.098 &&
                  rec.outcome_time <= 0.102;
  return {ok, fmt("blow-up at t=%.6f (exact 0.1)", rec.outcome_time)};
}

Verdict gronwall_floor_check() {
  std::mt19937_64 rng(1003);
  int runs = 0;
  std::size_t samples = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int n : {2, 3, 4, 5}) {
    ModelParams p = model(n, 0.0);
    p.f_coeffs[{0, 0}] = {0.5, 0.5};
    p.f_coeffs[{n - 1, 0}] = {-0.3, 0.2};
    const double alpha = 0.6 * max_half_slope(n);
    const double x0 = x_star_of(p, epsilon_of(n, alpha)).x_star + 4.0;
    const ConeParams cone = ConeParams::make(p, alpha, 1.0, x0);
    IntegratorOptions o = default_options(cone);
    o.stop_on_exit = true;
    const double w = cone.segment_half_width();
    std::uniform_real_distribution<double> uy(-w, w);
    for (int i = 0; i < 25; ++i, ++runs) {
      const TrajectoryRecord rec = simulate(p, cone, ZeroPath{}, {x0, i == 0 ? 0.0 : uy(rng)}, o);
      for (const Sample& s : rec.samples) {
        if (s.t >= cone.T || !in_cone(cone, s.z)) break;
        worst = std::min(worst, s.z.x / gronwall_floor(cone, s.t));
        ++samples;
      }
    }
  }
  return {worst >= 0.99 && samples > 0,
          fmt("%.0f runs, %.0f in-cone samples, min X/floor %.4f", runs,
              static_cast<double>(samples), worst)};
}

Verdict sine_constants_check() {
  const SineConstants sc = sine_constants(2);
  const double err = std::max(std::abs(sc.b_n - 1.0), std::abs(sc.a_n - 1.0));
  return {err <= 1e-10, fmt("n=2: b=%.12f a=%.12f", sc.b_n, sc.a_n)};
}

Verdict bridge_consistency() {
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  std::vector<double> times(10000);
  for (double& t : times) t = ut(rng);
  std::vector<std::size_t> order(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });

  const BrownianPath random_path(31337, 1.0);
  const BrownianPath sorted_path(31337, 1.0);
  BrownianPath::Cursor ca, cb;
  std::vector<double> a(times.size()), b(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) a[i] = random_path.sample(1, times[i], ca);
  for (std::size_t i : order) b[i] = sorted_path.sample(1, times[i], cb);
  const bool identical = a == b;

  double sum = 0.0, sq = 0.0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const double w = BrownianPath(static_cast<std::uint64_t>(s), 1.0).sample(1, 1.0);
    sum += w;
    sq += w * w;
  }
  const double mean = sum / seeds;
  const double var = (sq - seeds * mean * mean) / (seeds - 1);
  return {identical && var >= 0.95 && var <= 1.05,
          std::string(identical ? "orders bit-identical" : "ORDER MISMATCH") +
              fmt(", Var W(1) = %.4f over 1e4 seeds", var)};
}

Verdict bisection_symmetry() {
  const ModelParams p = model(2, 0.0);
  const ConeParams cone = ConeParams::make(p, 0.5, 1.0, 10.0);
  const IntegratorOptions o = default_options(cone);
  const BisectionResult r = bisect_exploding_point(p, cone, ZeroPath{}, 1e-10, 200, o);
  const bool ok = std::abs(r.y_star) <= 1e-8 * cone.x0 && r.record.outcome == Outcome::BlowUp;
  return {ok, fmt("y*=%.3g, blow-up at t=%.5f", r.y_star, r.record.outcome_time)};
}

ExperimentConfig base_experiment() {
  ExperimentConfig cfg;
  cfg.model = model(3, 1.0);
  cfg.alpha = 0.2;
  cfg.c = 1.0;
  return cfg;
}

struct McRuns {
  MonteCarloReport inclusion;
  MonteCarloReport trend;
};

Verdict inclusion_check(const MonteCarloReport& rep) {
  const MonteCarloPoint& p = rep.points.front();
  return {rep.inclusion_violations() == 0 && p.failures == 0,
          fmt("N=%.0f: B1&B2 in %.0f, violations %.0f", p.n, p.b1b2,
              rep.inclusion_violations()) +
              fmt(", lenient %.3f, strict %.3f", p.p_hat, p.p_hat_strict)};
}

Verdict trend_check(const MonteCarloReport& rep) {
  std::string detail = "p_hat:";
  for (const MonteCarloPoint& p : rep.points) {
    detail += fmt(" x0=%g %.3f [%.3f,", p.x0, p.p_hat, p.ci.lo) + fmt("%.3f]", p.ci.hi);
  }
  const double last = rep.points.back().p_hat;
  return {rep.trend_ok() && last >= 0.95, detail};
}

Verdict time_bound_check(const McRuns& runs) {
  int strict = 0, violations = 0;
  double worst = 0.0;
  for (const MonteCarloReport* rep : {&runs.inclusion, &runs.trend}) {
    violations += rep->time_bound_violations();
    for (const ReplicateResult& r : rep->replicates) {
      if (!r.blowup_time) continue;
      const double T = ConeParams::make(rep->config.model, rep->config.alpha, rep->config.c, r.x0).T;
      if (r.strict) ++strict;
      worst = std::max(worst, *r.blowup_time / T);
    }
  }
  return {violations == 0,
          fmt("%.0f strict successes, %.0f violations, max blow-up time / T = %.4f", strict,
              violations, worst)};
}

Verdict flow_composition() {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int> un(2, 3);
  std::uniform_real_distribution<double> usig(0.2, 1.5), uz(-1.0, 1.0), uc(-0.3, 0.3);
  std::uniform_int_distribution<std::uint64_t> useed;
  int cases = 0, decreasing = 0, skipped = 0;
  double worst = 0.0;
  while (cases < 20) {
    ModelParams p = model(un(rng), usig(rng));
    p.f_coeffs[{0, 0}] = {uc(rng), uc(rng)};
    p.f_coeffs[{1, 0}] = {uc(rng), uc(rng)};
    const State z0{uz(rng), uz(rng)};
    IntegratorOverrides ov;
    const IntegratorOptions o = ov.resolve(z0, 1.0);
    const NoisePath path = BrownianPath(useed(rng), 1.0);
    const FlowCheckReport r =
        check_flow_property(p, path, z0, default_restart_times(1.0), 1.0, 1e-2, o);
    if (!r.comparable) {
      ++skipped;
      continue;
    }
    ++cases;
    if (r.decreasing()) ++decreasing;
    worst = std::max(worst, r.ratio());
  }
  return {decreasing == cases,
          fmt("%.0f/20 decreasing, worst ratio %.3f, %.0f non-comparable draws skipped", decreasing,
              worst, skipped)};
}

Verdict longrun_smoke() {
  const ModelParams p = model(2, 1.0);
  IntegratorOverrides ov;
  const IntegratorOptions o = ov.resolve({0.0, 0.0}, 1000.0);
  const auto run = [&] {
    const NoisePath path = BrownianPath(2718, 1000.0);
    const LongrunSummary s = run_onepoint_longrun(p, path, {0.0, 0.0}, 1000.0, 100.0, 0.1, o, 10.0);
    nlohmann::json j = io::to_json(s);
    j["samples"] = s.samples.size();
    std::uint64_t h = 0;
    for (const Sample& x : s.samples) {
      h = mix64(h ^ std::bit_cast<std::uint64_t>(x.z.x));
      h = mix64(h ^ std::bit_cast<std::uint64_t>(x.z.y));
    }
    j["sample_hash"] = h;
    return std::make_pair(s, j.dump());
  };
  const auto [a, ja] = run();
  const auto [b, jb] = run();
  const bool ok = !a.numerical_explosion && a.max_radius < o.r_blow && ja == jb;
  return {ok, fmt("max |z| = %.2f (r_blow %.0g), %.0f steps", a.max_radius, o.r_blow,
                  static_cast<double>(a.steps)) +
                  (ja == jb ? ", report bit-identical on rerun" : ", RERUN DIFFERS")};
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](int id, const char* name, double limit_s,
                          const std::function<Verdict()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_s > 0.0 && secs > limit_s) {
      v.pass = false;
      v.detail += fmt(" [over the %.0f s budget]", limit_s);
    }
    if (!v.pass) ++failed;
    std::printf("%s [%2d] %-28s %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "drift equivalence", 10, drift_equivalence);
  report(2, "deterministic blow-up", 1, blowup_oracle);
  report(3, "gronwall floor", 30, gronwall_floor_check);
  report(4, "sine constants", 0, sine_constants_check);
  report(5, "bridge consistency", 0, bridge_consistency);
  report(6, "bisection symmetry", 5, bisection_symmetry);

  McRuns runs;
  report(7, "inclusion B1&B2 => success", 600, [&] {
    ExperimentConfig cfg = base_experiment();
    cfg.x0_grid = {20.0};
    cfg.replicates = 500;
    cfg.master_seed = 7007;
    runs.inclusion = run_montecarlo(cfg);
    return inclusion_check(runs.inclusion);
  });
  report(8, "blow-up probability trend", 1200, [&] {
    ExperimentConfig cfg = base_experiment();
    cfg.x0_grid = {5.0, 10.0, 20.0, 40.0};
    cfg.replicates = 200;
    cfg.master_seed = 8008;
    runs.trend = run_montecarlo(cfg);
    return trend_check(runs.trend);
  });
  report(9, "blow-up time bound", 0, [&] { return time_bound_check(runs); });
  report(10, "flow composition", 0, flow_composition);
  report(11, "one-point long run", 0, longrun_smoke);

  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
