#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <utility>

namespace blowup {

/// A point (x, y) of the plane, identified with z = x + iy.
struct State {
  double x = 0.0;
  double y = 0.0;

  [[nodiscard]] double norm() const;
  [[nodiscard]] bool finite() const;
};

/// Drift vector. Non-finite components signal floating-point overflow; callers
/// treat that as blow-up evidence.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  [[nodiscard]] bool overflow() const;
};

/// Exponent pair (j, k) of the monomial z^j conj(z)^k.
using Monomial = std::pair<int, int>;

/// Parameters of dZ = (Z^n + F(Z)) dt + sigma dB with
/// F(z) = sum c_jk z^j conj(z)^k over a finite coefficient table.
struct ModelParams {
  int n = 2;
  double sigma = 0.0;
  // std::map keeps the (j, k) iteration order fixed, so evaluation is
  // bit-for-bit deterministic.
  std::map<Monomial, std::complex<double>> f_coeffs;

  /// Throws std::invalid_argument on n < 2, bad sigma, or a coefficient that
  /// violates j, k >= 0, j + k <= n - 1 or is non-finite.
  void validate() const;

  /// S = sum |c_jk|. For |z| >= 1, |F(z)| <= S |z|^(n-1).
  [[nodiscard]] double coeff_l1() const;
};

/// (Re F, Im F) at (x, y).
[[nodiscard]] Vec2 perturbation(const ModelParams& params, State s);

/// Drift via the alternating binomial sums for Re z^n and Im z^n plus F.
[[nodiscard]] Vec2 drift_binomial(const ModelParams& params, State s);

/// Drift via r^n (cos n phi, sin n phi) with phi = arctan(y / x), plus F.
/// Throws std::domain_error unless s.x > 0.
[[nodiscard]] Vec2 drift_polar(const ModelParams& params, State s);

/// tan(pi / (2n)): the half-slope of the initial segment and the supremum of
/// admissible cone slopes.
[[nodiscard]] double max_half_slope(int n);

/// cos(n arctan alpha), the infimum of cos(n arctan(y/x)) over |y| <= alpha x.
/// Throws std::invalid_argument unless 0 < alpha < tan(pi / (2n)).
[[nodiscard]] double epsilon_of(int n, double alpha);

struct PerturbationBound {
  double x_star = 1.0;  // x >= x_star implies |Re F| / r^n <= epsilon / 2
  double C = 0.0;       // |Im F| <= C |z|^(n-1) for |z| >= x_star
};

/// x_star = max(1, 2 S / epsilon) and C = S, S = sum |c_jk|.
[[nodiscard]] PerturbationBound x_star_of(const ModelParams& params, double epsilon);

struct SineConstants {
  double b_n = 0.0;  // smallest positive root of sin(n arctan z) - z
  double a_n = 0.0;  // sin(n arctan b_n)
};

/// Throws std::invalid_argument for n < 2 and std::runtime_error if no sign
/// change is found.
[[nodiscard]] SineConstants sine_constants(int n);

/// Cone x >= x_star, |y| <= alpha x and the constants derived from it.
struct ConeParams {
  int n = 2;
  double alpha = 0.0;
  double x_star = 1.0;
  double c = 1.0;
  double x0 = 0.0;

  double x1 = 0.0;       // x0 - c
  double epsilon = 0.0;  // cos(n arctan alpha)
  double T = 0.0;        // 1 / ((epsilon / 2)(n - 1) x1^(n-1))
  double C = 0.0;
  double a_n = 0.0;
  double b_n = 0.0;

  /// Derives every constant from the model and (alpha, c, x0). Throws
  /// std::invalid_argument when alpha is out of range or x0 <= x_star + c.
  static ConeParams make(const ModelParams& params, double alpha, double c, double x0);

  /// Half-width tan(pi / (2n)) x0 of the initial segment {x0} x [-w, w].
  [[nodiscard]] double segment_half_width() const;

  /// (a_n x1) min ((alpha / 4) x1) >= C, the size condition under which the
  /// trapping bound away from the x-axis holds.
  [[nodiscard]] bool trapping_condition_holds() const;
};

[[nodiscard]] bool in_cone(const ConeParams& cone, State s);

}  // namespace blowup
