#include "blowup/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blowup {

std::string_view to_string(Tag tag) {
  switch (tag) {
    case Tag::R: return "R";
    case Tag::B: return "B";
    case Tag::G: return "G";
  }
  return "?";
}

std::string_view to_string(BisectionResult::Status s) {
  switch (s) {
    case BisectionResult::Status::Witness: return "witness";
    case BisectionResult::Status::Converged: return "converged";
    case BisectionResult::Status::Exhausted: return "exhausted";
  }
  return "?";
}

Tag classify(const TrajectoryRecord& rec, double T) {
  if (rec.outcome == Outcome::ExitUpper && rec.outcome_time <= T) return Tag::R;
  if (rec.outcome == Outcome::ExitLower && rec.outcome_time <= T) return Tag::B;
  return Tag::G;
}

double Bracket::width() const { return std::abs(y_r - y_b); }

bool SegmentClassification::has_g() const {
  return std::any_of(points.begin(), points.end(),
                     [](const PointClass& p) { return p.tag == Tag::G; });
}

std::size_t SegmentClassification::count(Tag tag) const {
  return static_cast<std::size_t>(std::count_if(
      points.begin(), points.end(), [tag](const PointClass& p) { return p.tag == tag; }));
}

namespace {

IntegratorOptions exit_options(IntegratorOptions opts) {
  opts.stop_on_exit = true;
  opts.t_start = 0.0;
  return opts;
}

}  // namespace

SegmentClassification scan_segment(const ModelParams& params, const ConeParams& cone,
                                   const NoisePath& path, int m, const IntegratorOptions& opts,
                                   bool widened) {
  if (m < 2) throw std::invalid_argument("scan_segment: m must be >= 2");
  const IntegratorOptions run_opts = exit_options(opts);
  const double w = widened ? cone.x0 : cone.segment_half_width();

  SegmentClassification out;
  out.x0 = cone.x0;
  out.points.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    PointClass p;
    p.y = -w + 2.0 * w * i / (m - 1);
    try {
      const TrajectoryRecord rec = simulate(params, cone, path, {cone.x0, p.y}, run_opts);
      p.tag = classify(rec, cone.T);
      p.outcome = rec.outcome;
      p.outcome_time = rec.outcome_time;
      p.overflow = rec.overflow;
    } catch (const std::exception& e) {
      p.tag = Tag::G;
      p.error = true;
      p.message = e.what();
    }
    out.points.push_back(std::move(p));
  }
  for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
    const PointClass& a = out.points[i];
    const PointClass& b = out.points[i + 1];
    if (a.tag == Tag::B && b.tag == Tag::R) out.brackets.push_back({a.y, b.y});
    if (a.tag == Tag::R && b.tag == Tag::B) out.brackets.push_back({b.y, a.y});
  }
  return out;
}

std::string_view TrappingReport::verdict() const {
  if (!upper.applicable && !lower.applicable) return "vacuous";
  if (passed()) return "pass";
  return precondition_ok ? "fail" : "precondition-failed";
}

TrappingReport verify_trapping(const TrajectoryRecord& record, const ConeParams& cone,
                               double eta) {
  TrappingReport rep;
  rep.slack = 2.0 * eta * (1.0 + cone.x0);
  const double level = 0.25 * cone.alpha * cone.x1;
  const double end = record.events.tau().value_or(record.outcome_time);

  rep.min_x = std::numeric_limits<double>::infinity();
  const double x_horizon = std::min(cone.T, record.outcome_time);
  for (const Sample& s : record.samples) {
    if (s.t <= x_horizon) rep.min_x = std::min(rep.min_x, s.z.x);
  }
  rep.precondition_ok = rep.min_x >= cone.x1;

  const auto check = [&](std::optional<double> nu, double sign) {
    TrappingCheck c;
    if (!nu || *nu > end) return c;
    c.applicable = true;
    c.margin = std::numeric_limits<double>::infinity();
    for (const Sample& s : record.samples) {
      if (s.t < *nu || s.t > end) continue;
      const double m = sign * s.z.y - level;
      c.margin = std::min(c.margin, m);
      if (m < -rep.slack) c.passed = false;
    }
    if (!std::isfinite(c.margin)) c.margin = 0.0;
    return c;
  };
  rep.upper = check(record.events.nu_plus, 1.0);
  rep.lower = check(record.events.nu_minus, -1.0);
  return rep;
}

BisectionResult bisect_exploding_point(const ModelParams& params, const ConeParams& cone,
                                       const NoisePath& path, Bracket initial, double tol,
                                       int max_iter, const IntegratorOptions& opts) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisect: tol must be > 0");
  if (max_iter < 0) throw std::invalid_argument("bisect: max_iter must be >= 0");
  IntegratorOptions run_opts = exit_options(opts);
  run_opts.record_stride = 1;
  const auto run = [&](double y) { return simulate(params, cone, path, {cone.x0, y}, run_opts); };

  BisectionResult res;
  res.b_end = run(initial.y_b);
  res.r_end = run(initial.y_r);
  if (classify(res.b_end, cone.T) != Tag::B || classify(res.r_end, cone.T) != Tag::R) {
    throw std::logic_error("bisect: bracket ends must be tagged B and R");
  }
  Bracket br = initial;
  res.history.push_back(br);
  const double target = tol * cone.x0;

  bool have_mid = false;
  while (br.width() > target && res.iterations < max_iter) {
    const double mid = 0.5 * (br.y_b + br.y_r);
    TrajectoryRecord rec = run(mid);
    ++res.iterations;
    have_mid = true;
    res.y_star = mid;
    switch (classify(rec, cone.T)) {
      case Tag::G:
        res.record = std::move(rec);
        res.status = BisectionResult::Status::Witness;
        return res;
      case Tag::R:
        br.y_r = mid;
        res.r_end = rec;
        break;
      case Tag::B:
        br.y_b = mid;
        res.b_end = rec;
        break;
    }
    res.record = std::move(rec);
    res.history.push_back(br);
  }
  if (!have_mid) {
    res.y_star = 0.5 * (br.y_b + br.y_r);
    res.record = run(res.y_star);
  }
  res.status = br.width() <= target ? BisectionResult::Status::Converged
                                    : BisectionResult::Status::Exhausted;

  const TrappingReport b_rep = verify_trapping(res.b_end, cone, opts.eta);
  const TrappingReport r_rep = verify_trapping(res.r_end, cone, opts.eta);
  res.jump_certified = (b_rep.upper.applicable && !b_rep.upper.passed) ||
                       (r_rep.lower.applicable && !r_rep.lower.passed);
  return res;
}

BisectionResult bisect_exploding_point(const ModelParams& params, const ConeParams& cone,
                                       const NoisePath& path, double tol, int max_iter,
                                       const IntegratorOptions& opts) {
  const double w = cone.segment_half_width();
  return bisect_exploding_point(params, cone, path, Bracket{-w, w}, tol, max_iter, opts);
}

EventFlags noise_events(const NoisePath& path, const ConeParams& cone, double sigma, int depth) {
  EventFlags f;
  f.sup1 = running_sup_abs(path, 1, cone.T, depth);
  f.sup2 = running_sup_abs(path, 2, cone.T, depth);
  f.b1 = sigma * f.sup1 <= cone.c;
  f.b2 = sigma * f.sup2 <= cone.alpha / 8.0 * cone.x1;
  return f;
}

EventFlags check_events(const TrajectoryRecord& record, const NoisePath& path,
                        const ConeParams& cone, double sigma, int depth) {
  EventFlags f = noise_events(path, cone, sigma, depth);
  const double until = std::min(cone.T, record.outcome_time);
  for (const Sample& s : record.samples) {
    if (s.t <= until && s.z.x < cone.x1) {
      f.infx_ok = false;
      break;
    }
  }
  return f;
}

}  // namespace blowup
