// Command-line front-end: one subcommand per experiment, each writing a JSON
// report (plus CSV tables) into --out.
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 invariant violation.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "blowup/config.hpp"
#include "blowup/drift.hpp"
#include "blowup/experiments.hpp"
#include "blowup/flow.hpp"
#include "blowup/integrator.hpp"
#include "blowup/io.hpp"
#include "blowup/noise.hpp"

namespace fs = std::filesystem;
using namespace blowup;
using io::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvariantViolation = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

Config load(const Common& common) {
  Config cfg = load_config(common.config);
  if (common.seed) cfg.seed = *common.seed;
  fs::create_directories(common.out);
  return cfg;
}

std::optional<std::uint64_t> seed_of(const NoisePath& path) {
  if (const auto* bp = std::get_if<BrownianPath>(&path)) return bp->seed();
  return std::nullopt;
}

void write_text(const fs::path& file, const auto& writer) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  writer(out);
}

json header(const char* experiment, const Config& cfg) {
  return {{"schema_version", kSchemaVersion},
          {"experiment", experiment},
          {"model", io::to_json(cfg.model)},
          {"seed", cfg.seed},
          {"noise", cfg.noise}};
}

int drift_check(const Common& common, long points) {
  const Config cfg = load(common);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ux(1e-3, 1e3), uslope(-10.0, 10.0);
  double worst = 0.0;
  State worst_at;
  for (long i = 0; i < points; ++i) {
    const double x = ux(rng);
    const State s{x, uslope(rng) * x};
    const Vec2 a = drift_binomial(cfg.model, s);
    const Vec2 b = drift_polar(cfg.model, s);
    const double scale = std::pow(s.norm(), cfg.model.n) +
                         cfg.model.coeff_l1() * std::pow(s.norm(), cfg.model.n - 1);
    const double err = std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)) / scale;
    if (err > worst) {
      worst = err;
      worst_at = s;
    }
  }
  json j = header("drift-check", cfg);
  j["points"] = points;
  j["max_relative_error"] = worst;
  j["worst_point"] = {worst_at.x, worst_at.y};
  j["tolerance"] = 1e-9;
  const double eps = epsilon_of(cfg.model.n, cfg.alpha);
  const PerturbationBound pb = x_star_of(cfg.model, eps);
  const SineConstants sc = sine_constants(cfg.model.n);
  j["constants"] = {{"epsilon", eps}, {"x_star", pb.x_star}, {"C", pb.C},
                    {"b_n", sc.b_n},  {"a_n", sc.a_n}};
  if (cfg.x0) j["cone"] = io::to_json(cfg.cone());
  io::write_json(fs::path(common.out) / "drift_check.json", j);
  std::cout << "max relative error " << worst << " over " << points << " points\n";
  return worst <= 1e-9 ? kOk : kInvariantViolation;
}

int simulate_cmd(const Common& common) {
  const Config cfg = load(common);
  std::optional<ConeParams> cone;
  if (cfg.x0) cone = cfg.cone();
  const State z0 = cfg.z0 ? *cfg.z0
                          : State{cfg.x0.value_or(1.0), cfg.y0.value_or(0.0)};
  const IntegratorOptions opts = cone ? cfg.integrator.resolve(*cone)
                                      : cfg.integrator.resolve(z0, 1.0);
  const NoisePath path = cfg.make_path(opts.t_end);
  const TrajectoryRecord rec =
      cone ? simulate(cfg.model, *cone, path, z0, opts) : simulate(cfg.model, path, z0, opts);
  write_text(fs::path(common.out) / "trajectory.csv",
             [&](std::ostream& o) { io::write_trajectory_csv(o, rec); });
  json j = io::trajectory_sidecar(rec, opts, seed_of(path));
  j["model"] = io::to_json(cfg.model);
  if (cone) {
    j["cone"] = io::to_json(*cone);
    j["trapping"] = io::to_json(verify_trapping(rec, *cone, opts.eta));
  }
  io::write_json(fs::path(common.out) / "trajectory.json", j);
  std::cout << to_string(rec.outcome) << " at t=" << rec.outcome_time << " after " << rec.steps
            << " steps\n";
  return kOk;
}

int scan_cmd(const Common& common) {
  const Config cfg = load(common);
  const ConeParams cone = cfg.cone();
  const IntegratorOptions opts = cfg.integrator.resolve(cone);
  const NoisePath path = cfg.make_path(opts.t_end);
  const SegmentClassification scan = scan_segment(cfg.model, cone, path, cfg.m, opts, cfg.widened);
  json j = header("scan", cfg);
  j["cone"] = io::to_json(cone);
  j["options"] = io::to_json(opts);
  j["events"] = io::to_json(noise_events(path, cone, cfg.model.sigma, cfg.sup_depth));
  j["classification"] = io::to_json(scan);
  io::write_json(fs::path(common.out) / "scan.json", j);
  write_text(fs::path(common.out) / "scan.csv",
             [&](std::ostream& o) { io::write_scan_csv(o, scan); });
  std::cout << "R=" << scan.count(Tag::R) << " B=" << scan.count(Tag::B)
            << " G=" << scan.count(Tag::G) << " brackets=" << scan.brackets.size() << '\n';
  return kOk;
}

int bisect_cmd(const Common& common, bool from_scan) {
  const Config cfg = load(common);
  const ConeParams cone = cfg.cone();
  const IntegratorOptions opts = cfg.integrator.resolve(cone);
  const NoisePath path = cfg.make_path(opts.t_end);
  const double w = cone.segment_half_width();
  Bracket bracket{-w, w};
  if (from_scan) {
    const SegmentClassification scan = scan_segment(cfg.model, cone, path, cfg.m, opts);
    if (scan.brackets.empty()) {
      std::cerr << "scan found no B/R bracket; using the segment ends\n";
    } else {
      bracket = scan.brackets.front();
    }
  }
  const BisectionResult res =
      bisect_exploding_point(cfg.model, cone, path, bracket, cfg.tol, cfg.max_iter, opts);
  const EventFlags flags = check_events(res.record, path, cone, cfg.model.sigma, cfg.sup_depth);
  const bool lenient =
      res.resolved() || (res.status == BisectionResult::Status::Converged && !res.jump_certified);

  json j = header("bisect", cfg);
  j["cone"] = io::to_json(cone);
  j["options"] = io::to_json(opts);
  j["bisection"] = io::to_json(res);
  j["flags"] = io::to_json(flags);
  j["trapping"] = io::to_json(verify_trapping(res.record, cone, opts.eta));
  j["lenient_success"] = lenient;
  io::write_json(fs::path(common.out) / "bisect.json", j);
  write_text(fs::path(common.out) / "bisect_witness.csv",
             [&](std::ostream& o) { io::write_trajectory_csv(o, res.record); });
  std::cout << to_string(res.status) << " y*=" << res.y_star << " outcome "
            << to_string(res.record.outcome) << " at t=" << res.record.outcome_time << '\n';
  return flags.b1 && flags.b2 && !lenient ? kInvariantViolation : kOk;
}

int montecarlo_cmd(const Common& common) {
  const Config cfg = load(common);
  const MonteCarloReport rep = run_montecarlo(cfg.experiment());
  io::write_json(fs::path(common.out) / "montecarlo.json", io::to_json(rep));
  write_text(fs::path(common.out) / "montecarlo.csv",
             [&](std::ostream& o) { io::write_montecarlo_csv(o, rep); });
  for (const MonteCarloPoint& p : rep.points) {
    std::cout << "x0=" << p.x0 << " p_hat=" << p.p_hat << " [" << p.ci.lo << ", " << p.ci.hi
              << "] strict=" << p.p_hat_strict << " freq(B1&B2)=" << p.freq_b1b2 << '\n';
  }
  const bool violated = rep.inclusion_violations() > 0 || rep.time_bound_violations() > 0;
  if (violated) std::cerr << "invariant violation: see montecarlo.json\n";
  return violated ? kInvariantViolation : kOk;
}

int flowcheck_cmd(const Common& common) {
  const Config cfg = load(common);
  const State z0 = cfg.z0 ? *cfg.z0 : State{cfg.x0.value_or(0.1), cfg.y0.value_or(0.0)};
  const IntegratorOptions opts = cfg.integrator.resolve(z0, 1.0);
  const NoisePath path = cfg.make_path(opts.t_end);
  const std::vector<double> t_mids =
      cfg.t_mid.empty() ? default_restart_times(opts.t_end) : cfg.t_mid;
  const FlowCheckReport rep =
      check_flow_property(cfg.model, path, z0, t_mids, opts.t_end, cfg.flow_tol, opts);
  json j = header("flowcheck", cfg);
  j["options"] = io::to_json(opts);
  j["report"] = io::to_json(rep);
  io::write_json(fs::path(common.out) / "flowcheck.json", j);
  std::cout << (rep.comparable ? "discrepancy " + std::to_string(rep.discrepancy) +
                                     " -> " + std::to_string(rep.discrepancy_half_eta)
                               : rep.reason)
            << '\n';
  return rep.comparable && !rep.decreasing() && rep.discrepancy > 0.0 ? kInvariantViolation
                                                                      : kOk;
}

int longrun_cmd(const Common& common) {
  const Config cfg = load(common);
  const State z0 = cfg.z0.value_or(State{});
  const IntegratorOptions opts = cfg.integrator.resolve(z0, cfg.t_long);
  const NoisePath path = cfg.make_path(cfg.t_long);
  const double x_star = x_star_of(cfg.model, epsilon_of(cfg.model.n, cfg.alpha)).x_star;
  const LongrunSummary s = run_onepoint_longrun(cfg.model, path, z0, cfg.t_long, cfg.burn_in,
                                                cfg.stride, opts, 10.0 * x_star,
                                                cfg.histogram_range);
  json j = header("longrun", cfg);
  j["options"] = io::to_json(opts);
  j["z0"] = {z0.x, z0.y};
  j["summary"] = io::to_json(s);
  io::write_json(fs::path(common.out) / "longrun.json", j);
  write_text(fs::path(common.out) / "longrun_samples.csv",
             [&](std::ostream& o) { io::write_samples_csv(o, s); });
  if (s.numerical_explosion) std::cerr << s.diagnostics << '\n';
  std::cout << "steps=" << s.steps << " max|z|=" << s.max_radius
            << " excursions=" << s.excursions
            << (s.numerical_explosion ? " NUMERICAL EXPLOSION" : "") << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explosive planar SDE: drift checks, trajectories, flow scans and Monte Carlo"};
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Key-value configuration file")->required();
    sub->add_option("--seed", common.seed, "Seed (overrides the config)");
    sub->add_option("--out", common.out, "Output directory");
  };

  long points = 100000;
  bool from_scan = false;
  auto* drift = app.add_subcommand("drift-check", "Binomial vs polar drift agreement");
  add_common(drift);
  drift->add_option("--points", points, "Random evaluation points");
  auto* sim = app.add_subcommand("simulate", "One trajectory");
  add_common(sim);
  auto* scan = app.add_subcommand("scan", "Classify the initial segment under one noise path");
  add_common(scan);
  auto* bisect = app.add_subcommand("bisect", "Locate a trapped initial point by bisection");
  add_common(bisect);
  bisect->add_flag("--from-scan", from_scan, "Start from the first bracket of a scan");
  auto* mc = app.add_subcommand("montecarlo", "Flow blow-up probability versus x0");
  add_common(mc);
  auto* flow = app.add_subcommand("flowcheck", "Flow composition check");
  add_common(flow);
  auto* longrun = app.add_subcommand("longrun", "Long one-point run");
  add_common(longrun);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : 1;
  }
  try {
    if (*drift) return drift_check(common, points);
    if (*sim) return simulate_cmd(common);
    if (*scan) return scan_cmd(common);
    if (*bisect) return bisect_cmd(common, from_scan);
    if (*mc) return montecarlo_cmd(common);
    if (*flow) return flowcheck_cmd(common);
    if (*longrun) return longrun_cmd(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
