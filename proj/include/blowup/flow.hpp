#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blowup/drift.hpp"
#include "blowup/integrator.hpp"
#include "blowup/noise.hpp"

namespace blowup {

/// R: leaves the cone through y = alpha x first, before T.
/// B: leaves through y = -alpha x first, before T.
/// G: no exit before T (blow-up inside the cone, or survival).
enum class Tag { R, B, G };

[[nodiscard]] std::string_view to_string(Tag tag);

/// Tag of a run made with stop_on_exit. A crossing of both boundaries in one
/// step was already resolved by the integrator in favour of the earlier
/// interpolated time (upper on exact ties).
[[nodiscard]] Tag classify(const TrajectoryRecord& rec, double T);

struct PointClass {
  double y = 0.0;
  Tag tag = Tag::G;
  Outcome outcome = Outcome::Survived;
  double outcome_time = 0.0;
  bool overflow = false;
  bool error = false;
  std::string message;
};

/// Initial ordinates of a B-tagged and an R-tagged point. Either may be the
/// larger one.
struct Bracket {
  double y_b = 0.0;
  double y_r = 0.0;

  [[nodiscard]] double width() const;
};

struct SegmentClassification {
  double x0 = 0.0;
  std::vector<PointClass> points;  // sorted by y
  std::vector<Bracket> brackets;   // adjacent B/R pairs

  [[nodiscard]] bool has_g() const;
  [[nodiscard]] std::size_t count(Tag tag) const;
};

/// Simulates m evenly spaced points of {x0} x [-w, w] under one shared path,
/// w = tan(pi/(2n)) x0 (or w = x0 when `widened`). Integrator failures do not
/// abort the scan; such points are tagged G with `error` set.
[[nodiscard]] SegmentClassification scan_segment(const ModelParams& params,
                                                 const ConeParams& cone,
                                                 const NoisePath& path, int m,
                                                 const IntegratorOptions& opts,
                                                 bool widened = false);

struct TrappingCheck {
  bool applicable = false;  // the nu event occurred
  bool passed = true;
  double margin = 0.0;      // min over checked samples of +-Y - (alpha/4) x1
};

struct TrappingReport {
  TrappingCheck upper;  // after nu_plus:  Y >= (alpha/4) x1 - slack
  TrappingCheck lower;  // after nu_minus: Y <= -(alpha/4) x1 + slack
  bool precondition_ok = true;  // min recorded X up to min(T, end) >= x1
  double min_x = 0.0;
  double slack = 0.0;

  [[nodiscard]] bool passed() const { return upper.passed && lower.passed; }
  /// "vacuous", "pass", "fail", or "precondition-failed" (a failure recorded
  /// while inf X < x1, which the bound does not cover).
  [[nodiscard]] std::string_view verdict() const;
};

/// Checks the trapping bound away from the x-axis on the recorded samples in
/// [nu, tau]. The slack is 2 eta (1 + x0).
[[nodiscard]] TrappingReport verify_trapping(const TrajectoryRecord& record,
                                             const ConeParams& cone, double eta);

struct BisectionResult {
  enum class Status { Witness, Converged, Exhausted };

  Status status = Status::Exhausted;
  double y_star = 0.0;
  TrajectoryRecord record;        // run from (x0, y_star)
  std::vector<Bracket> history;   // initial bracket first
  TrajectoryRecord b_end;         // final B-tagged end
  TrajectoryRecord r_end;         // final R-tagged end
  /// One end violates the trapping bound in the direction of the other end's
  /// exit: the tag change is a genuine discontinuity at this resolution, not an
  /// unresolved trapped point.
  bool jump_certified = false;
  int iterations = 0;

  [[nodiscard]] bool resolved() const { return status == Status::Witness; }
  [[nodiscard]] bool blowup_witness() const {
    return resolved() && record.outcome == Outcome::BlowUp;
  }
};

[[nodiscard]] std::string_view to_string(BisectionResult::Status s);

/// Bisection on the initial ordinate under one shared path: R midpoints
/// replace the R end, B midpoints the B end, a G midpoint is returned as the
/// witness. Stops once the bracket is no wider than tol * x0 or after max_iter
/// midpoints. Throws std::logic_error if the ends do not carry tags B and R.
[[nodiscard]] BisectionResult bisect_exploding_point(const ModelParams& params,
                                                     const ConeParams& cone,
                                                     const NoisePath& path, Bracket initial,
                                                     double tol, int max_iter,
                                                     const IntegratorOptions& opts);

/// Same, starting from the segment ends (-w, w), w = tan(pi/(2n)) x0.
[[nodiscard]] BisectionResult bisect_exploding_point(const ModelParams& params,
                                                     const ConeParams& cone,
                                                     const NoisePath& path, double tol,
                                                     int max_iter,
                                                     const IntegratorOptions& opts);

struct EventFlags {
  bool b1 = true;      // sigma sup |W1| <= c on [0, T]
  bool b2 = true;      // sigma sup |W2| <= (alpha/8) x1 on [0, T]
  bool infx_ok = true; // recorded X >= x1 up to min(T, end)
  double sup1 = 0.0;   // grid suprema, never above the true ones
  double sup2 = 0.0;
};

inline constexpr int kDefaultSupDepth = 16;

/// B1 and B2 from the noise path alone; infx_ok is left true.
[[nodiscard]] EventFlags noise_events(const NoisePath& path, const ConeParams& cone,
                                      double sigma, int depth = kDefaultSupDepth);

[[nodiscard]] EventFlags check_events(const TrajectoryRecord& record, const NoisePath& path,
                                      const ConeParams& cone, double sigma,
                                      int depth = kDefaultSupDepth);

}  // namespace blowup
