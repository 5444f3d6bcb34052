#include "blowup/drift.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace blowup {

double State::norm() const { return std::hypot(x, y); }

bool State::finite() const { return std::isfinite(x) && std::isfinite(y); }

bool Vec2::overflow() const { return !(std::isfinite(x) && std::isfinite(y)); }

void ModelParams::validate() const {
  if (n < 2) {
    throw std::invalid_argument("model: n must be >= 2, got " + std::to_string(n));
  }
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw std::invalid_argument("model: sigma must be finite and >= 0");
  }
  for (const auto& [key, c] : f_coeffs) {
    const auto [j, k] = key;
    if (j < 0 || k < 0 || j + k > n - 1) {
      throw std::invalid_argument("model: coefficient (" + std::to_string(j) + ", " +
                                  std::to_string(k) + ") violates j, k >= 0, j + k <= n - 1");
    }
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw std::invalid_argument("model: non-finite coefficient");
    }
  }
}

double ModelParams::coeff_l1() const {
  double s = 0.0;
  for (const auto& [key, c] : f_coeffs) s += std::abs(c);
  return s;
}

Vec2 perturbation(const ModelParams& params, State s) {
  if (params.f_coeffs.empty()) return {};
  // Powers z^j and conj(z)^k by repeated multiplication; degree <= n - 1.
  const int deg = params.n - 1;
  std::vector<std::complex<double>> zp(deg + 1), zbp(deg + 1);
  const std::complex<double> z{s.x, s.y};
  zp[0] = zbp[0] = 1.0;
  for (int i = 1; i <= deg; ++i) {
    zp[i] = zp[i - 1] * z;
    zbp[i] = zbp[i - 1] * std::conj(z);
  }
  std::complex<double> f{0.0, 0.0};
  for (const auto& [key, c] : params.f_coeffs) {
    f += c * zp[key.first] * zbp[key.second];
  }
  return {f.real(), f.imag()};
}

namespace {

// Re (x + iy)^n and Im (x + iy)^n as the alternating binomial sums.
Vec2 power_binomial(int n, double x, double y) {
  std::vector<double> px(n + 1), py(n + 1);
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    px[i] = px[i - 1] * x;
    py[i] = py[i - 1] * y;
  }
  double re = 0.0, im = 0.0;
  double binom = 1.0;  // C(n, i)
  for (int i = 0; i <= n; ++i) {
    const double term = binom * px[n - i] * py[i];
    switch (i % 4) {
      case 0: re += term; break;
      case 1: im += term; break;
      case 2: re -= term; break;
      case 3: im -= term; break;
    }
    binom = binom * (n - i) / (i + 1);
  }
  return {re, im};
}

}  // namespace

Vec2 drift_binomial(const ModelParams& params, State s) {
  const Vec2 b = power_binomial(params.n, s.x, s.y);
  const Vec2 f = perturbation(params, s);
  return {b.x + f.x, b.y + f.y};
}

Vec2 drift_polar(const ModelParams& params, State s) {
  if (!(s.x > 0.0)) {
    throw std::domain_error("drift_polar: requires x > 0");
  }
  const double r2 = s.x * s.x + s.y * s.y;
  const double rn = std::pow(r2, 0.5 * params.n);
  const double phi = params.n * std::atan(s.y / s.x);
  const Vec2 f = perturbation(params, s);
  return {rn * std::cos(phi) + f.x, rn * std::sin(phi) + f.y};
}

double max_half_slope(int n) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  return std::tan(std::numbers::pi / (2.0 * n));
}

double epsilon_of(int n, double alpha) {
  if (!(alpha > 0.0) || !(alpha < max_half_slope(n))) {
    throw std::invalid_argument("epsilon_of: alpha must lie in (0, tan(pi/(2n)))");
  }
  return std::cos(n * std::atan(alpha));
}

PerturbationBound x_star_of(const ModelParams& params, double epsilon) {
  params.validate();
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw std::invalid_argument("x_star_of: epsilon must lie in (0, 1]");
  }
  const double s = params.coeff_l1();
  return {std::max(1.0, 2.0 * s / epsilon), s};
}

SineConstants sine_constants(int n) {
  if (n < 2) throw std::invalid_argument("sine_constants: n must be >= 2");
  const auto g = [n](double z) { return std::sin(n * std::atan(z)) - z; };

  // First sign change on a forward grid, doubling the range if needed.
  double lo = 1e-8;
  double hi = 0.0;
  double span = 4.0 * max_half_slope(n);
  for (int attempt = 0; attempt < 8 && hi == 0.0; ++attempt, span *= 2.0) {
    constexpr int kGrid = 4096;
    double prev = lo;
    for (int i = 1; i <= kGrid; ++i) {
      const double z = 1e-8 + span * i / kGrid;
      if (g(z) <= 0.0) {
        lo = prev;
        hi = z;
        break;
      }
      prev = z;
    }
  }
  if (hi == 0.0 || !(g(lo) > 0.0)) {
    throw std::runtime_error("sine_constants: root bracketing failed for n = " + std::to_string(n));
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  const double b = 0.5 * (lo + hi);
  return {b, std::sin(n * std::atan(b))};
}

ConeParams ConeParams::make(const ModelParams& params, double alpha, double c, double x0) {
  params.validate();
  ConeParams cone;
  cone.n = params.n;
  cone.alpha = alpha;
  cone.epsilon = epsilon_of(params.n, alpha);
  const PerturbationBound pb = x_star_of(params, cone.epsilon);
  cone.x_star = pb.x_star;
  cone.C = pb.C;
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("cone: c must be finite and > 0");
  }
  cone.c = c;
  if (!(x0 > cone.x_star + c) || !std::isfinite(x0)) {
    throw std::invalid_argument("cone: x0 = " + std::to_string(x0) + " must exceed x_star + c = " +
                                std::to_string(cone.x_star + c));
  }
  cone.x0 = x0;
  cone.x1 = x0 - c;
  cone.T = 1.0 / (0.5 * cone.epsilon * (params.n - 1) * std::pow(cone.x1, params.n - 1));
  if (!(cone.T > 0.0) || !std::isfinite(cone.T)) {
    throw std::invalid_argument("cone: T is not a positive finite number");
  }
  const SineConstants sc = sine_constants(params.n);
  cone.a_n = sc.a_n;
  cone.b_n = sc.b_n;
  return cone;
}

double ConeParams::segment_half_width() const { return max_half_slope(n) * x0; }

bool ConeParams::trapping_condition_holds() const {
  return std::min(a_n * x1, 0.25 * alpha * x1) >= C;
}

bool in_cone(const ConeParams& cone, State s) {
  return s.x >= cone.x_star && std::abs(s.y) <= cone.alpha * s.x;
}

}  // namespace blowup
