#include "blowup/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <string>

namespace blowup::io {

namespace {

json optional_time(const std::optional<double>& t) { return t ? json(*t) : json(nullptr); }

// Enough digits to round-trip doubles through text.
void precise(std::ostream& out) { out << std::setprecision(std::numeric_limits<double>::max_digits10); }

}  // namespace

json to_json(const ModelParams& p) {
  json coeffs = json::array();
  for (const auto& [key, c] : p.f_coeffs) {
    coeffs.push_back({{"j", key.first}, {"k", key.second}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"n", p.n}, {"sigma", p.sigma}, {"coeffs", coeffs}};
}

json to_json(const ConeParams& c) {
  return {{"n", c.n},       {"alpha", c.alpha}, {"x_star", c.x_star}, {"c", c.c},
          {"x0", c.x0},     {"x1", c.x1},       {"epsilon", c.epsilon}, {"T", c.T},
          {"C", c.C},       {"a_n", c.a_n},     {"b_n", c.b_n},
          {"trapping_condition_holds", c.trapping_condition_holds()}};
}

json to_json(const IntegratorOptions& o) {
  return {{"h_max", o.h_max},     {"eta", o.eta},
          {"r_blow", o.r_blow},   {"t_start", o.t_start},
          {"t_end", o.t_end},     {"record_stride", o.record_stride},
          {"stop_on_exit", o.stop_on_exit}};
}

json to_json(const EventTimes& e) {
  return {{"tau_upper", optional_time(e.tau_upper)},
          {"tau_lower", optional_time(e.tau_lower)},
          {"nu_plus", optional_time(e.nu_plus)},
          {"nu_minus", optional_time(e.nu_minus)},
          {"tau", optional_time(e.tau())}};
}

json to_json(const EventFlags& f) {
  return {{"b1", f.b1}, {"b2", f.b2}, {"infx_ok", f.infx_ok}, {"sup1", f.sup1}, {"sup2", f.sup2}};
}

json to_json(const TrappingReport& r) {
  const auto check = [](const TrappingCheck& c) {
    return json{{"applicable", c.applicable}, {"passed", c.passed}, {"margin", c.margin}};
  };
  return {{"verdict", std::string(r.verdict())},
          {"upper", check(r.upper)},
          {"lower", check(r.lower)},
          {"precondition_ok", r.precondition_ok},
          {"min_x", r.min_x},
          {"slack", r.slack}};
}

json to_json(const SegmentClassification& s) {
  json points = json::array();
  for (const PointClass& p : s.points) {
    json j{{"y", p.y},
           {"tag", std::string(to_string(p.tag))},
           {"outcome", std::string(to_string(p.outcome))},
           {"time", p.outcome_time},
           {"overflow", p.overflow}};
    if (p.error) j["error"] = p.message;
    points.push_back(std::move(j));
  }
  json brackets = json::array();
  for (const Bracket& b : s.brackets) brackets.push_back({{"y_b", b.y_b}, {"y_r", b.y_r}});
  return {{"x0", s.x0},
          {"counts", {{"R", s.count(Tag::R)}, {"B", s.count(Tag::B)}, {"G", s.count(Tag::G)}}},
          {"points", points},
          {"brackets", brackets}};
}

json to_json(const BisectionResult& b) {
  json history = json::array();
  for (const Bracket& br : b.history) history.push_back({br.y_b, br.y_r});
  return {{"status", std::string(to_string(b.status))},
          {"y_star", b.y_star},
          {"outcome", std::string(to_string(b.record.outcome))},
          {"outcome_time", b.record.outcome_time},
          {"overflow", b.record.overflow},
          {"events", to_json(b.record.events)},
          {"iterations", b.iterations},
          {"jump_certified", b.jump_certified},
          {"history", history}};
}

json to_json(const ExperimentConfig& c) {
  json overrides = json::object();
  if (c.integrator.h_max) overrides["h_max"] = *c.integrator.h_max;
  if (c.integrator.eta) overrides["eta"] = *c.integrator.eta;
  if (c.integrator.r_blow) overrides["r_blow"] = *c.integrator.r_blow;
  if (c.integrator.t_end) overrides["t_end"] = *c.integrator.t_end;
  return {{"model", to_json(c.model)},     {"alpha", c.alpha},
          {"c", c.c},                      {"x0_grid", c.x0_grid},
          {"replicates", c.replicates},    {"master_seed", c.master_seed},
          {"integrator", overrides},       {"m", c.m},
          {"tol", c.tol},                  {"max_iter", c.max_iter},
          {"sup_depth", c.sup_depth},      {"time_factor", c.time_factor}};
}

json to_json(const MonteCarloReport& r, bool include_runtime) {
  json points = json::array();
  for (const MonteCarloPoint& p : r.points) {
    json j{{"x0", p.x0},
           {"T", p.T},
           {"n", p.n},
           {"strict", p.strict},
           {"lenient", p.lenient},
           {"p_hat", p.p_hat},
           {"p_hat_strict", p.p_hat_strict},
           {"wilson95", {p.ci.lo, p.ci.hi}},
           {"wilson95_strict", {p.ci_strict.lo, p.ci_strict.hi}},
           {"b1b2", p.b1b2},
           {"freq_b1b2", p.freq_b1b2},
           {"failures", p.failures},
           {"inclusion_violations", p.inclusion_violations},
           {"time_bound_violations", p.time_bound_violations}};
    if (include_runtime) j["mean_runtime_s"] = p.mean_runtime_s;
    points.push_back(std::move(j));
  }
  return {{"schema_version", kSchemaVersion},
          {"experiment", "montecarlo"},
          {"config", to_json(r.config)},
          {"points", points},
          {"trend_ok", r.trend_ok()},
          {"inclusion_violations", r.inclusion_violations()},
          {"time_bound_violations", r.time_bound_violations()},
          {"calibration_note",
           "x0 grid and thresholds are a desk-scale discretization of a limit statement"}};
}

json to_json(const FlowCheckReport& r) {
  return {{"comparable", r.comparable},
          {"reason", r.reason},
          {"t_mids", r.t_mids},
          {"per_mid", r.per_mid},
          {"per_mid_half_eta", r.per_mid_half_eta},
          {"discrepancy", r.discrepancy},
          {"discrepancy_half_eta", r.discrepancy_half_eta},
          {"ratio", r.comparable ? json(r.ratio()) : json(nullptr)},
          {"decreasing", r.comparable && r.decreasing()},
          {"within_tol", r.within_tol},
          {"direct", {r.direct.x, r.direct.y}},
          {"composed", {r.composed.x, r.composed.y}}};
}

json to_json(const LongrunSummary& s) {
  return {{"t_long", s.t_long},
          {"burn_in", s.burn_in},
          {"stride", s.stride},
          {"numerical_explosion", s.numerical_explosion},
          {"diagnostics", s.diagnostics},
          {"steps", s.steps},
          {"min_step", s.min_step},
          {"max_radius", s.max_radius},
          {"excursion_radius", s.excursion_radius},
          {"excursions", s.excursions},
          {"n_stats", s.n_stats},
          {"mean", {s.mean_x, s.mean_y}},
          {"var", {s.var_x, s.var_y}},
          {"mean_r", s.mean_r},
          {"window_mean_r", s.window_mean_r},
          {"histogram",
           {{"range", s.histogram.range},
            {"bins", s.histogram.bins},
            {"counts", s.histogram.counts},
            {"outside", s.histogram.outside}}}};
}

json trajectory_sidecar(const TrajectoryRecord& rec, const IntegratorOptions& opts,
                        std::optional<std::uint64_t> seed) {
  return {{"schema_version", kSchemaVersion},
          {"initial", {rec.initial.x, rec.initial.y}},
          {"outcome", std::string(to_string(rec.outcome))},
          {"outcome_time", rec.outcome_time},
          {"overflow", rec.overflow},
          {"events", to_json(rec.events)},
          {"steps", rec.steps},
          {"min_step", rec.min_step},
          {"max_budget_ratio", rec.max_budget_ratio},
          {"options", to_json(opts)},
          {"seed", seed ? json(*seed) : json(nullptr)}};
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec) {
  precise(out);
  out << "t,x,y\n";
  for (const Sample& s : rec.samples) out << s.t << ',' << s.z.x << ',' << s.z.y << '\n';
}

void write_scan_csv(std::ostream& out, const SegmentClassification& s) {
  precise(out);
  out << "y,tag,exit_time,outcome\n";
  for (const PointClass& p : s.points) {
    out << p.y << ',' << to_string(p.tag) << ',';
    if (p.outcome == Outcome::ExitUpper || p.outcome == Outcome::ExitLower) out << p.outcome_time;
    out << ',' << to_string(p.outcome) << '\n';
  }
}

void write_montecarlo_csv(std::ostream& out, const MonteCarloReport& r) {
  precise(out);
  out << "x0,replicate,seed,strict,lenient,b1,b2,blowup_time\n";
  for (const ReplicateResult& rr : r.replicates) {
    out << rr.x0 << ',' << rr.replicate << ',' << rr.seed << ',' << rr.strict << ','
        << rr.lenient << ',' << rr.b1 << ',' << rr.b2 << ',';
    if (rr.blowup_time) out << *rr.blowup_time;
    out << '\n';
  }
}

void write_samples_csv(std::ostream& out, const LongrunSummary& s) {
  precise(out);
  out << "t,x,y\n";
  for (const Sample& p : s.samples) out << p.t << ',' << p.z.x << ',' << p.z.y << '\n';
}

void write_json(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

}  // namespace blowup::io
