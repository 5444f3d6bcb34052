#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "blowup/drift.hpp"

using namespace blowup;

namespace {

ModelParams model(int n, std::map<Monomial, std::complex<double>> coeffs = {}) {
  ModelParams p;
  p.n = n;
  p.f_coeffs = std::move(coeffs);
  return p;
}

// Oracle: complex arithmetic, written without the library's power tables.
std::complex<double> oracle_drift(const ModelParams& p, double x, double y) {
  const std::complex<double> z{x, y};
  std::complex<double> out = std::pow(z, p.n);
  for (const auto& [jk, c] : p.f_coeffs) {
    out += c * std::pow(z, jk.first) * std::pow(std::conj(z), jk.second);
  }
  return out;
}

// First sign change of sin(n atan z) - z on a fine grid, polished by Newton.
double newton_root(int n) {
  double z = 1e-4;
  while (std::sin(n * std::atan(z)) - z > 0.0) z += 1e-4;
  for (int i = 0; i < 100; ++i) {
    const double g = std::sin(n * std::atan(z)) - z;
    const double dg = n * std::cos(n * std::atan(z)) / (1.0 + z * z) - 1.0;
    z -= g / dg;
  }
  return z;
}

ModelParams random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> un(2, 5);
  std::uniform_real_distribution<double> uc(-2.0, 2.0);
  ModelParams p = model(un(rng));
  std::uniform_int_distribution<int> count(0, 4);
  const int terms = count(rng);
  for (int i = 0; i < terms; ++i) {
    std::uniform_int_distribution<int> uj(0, p.n - 1);
    const int j = uj(rng);
    std::uniform_int_distribution<int> uk(0, p.n - 1 - j);
    p.f_coeffs[{j, uk(rng)}] = {uc(rng), uc(rng)};
  }
  return p;
}

}  // namespace

TEST_CASE("binomial drift on hand-computed points") {
  const Vec2 a = drift_binomial(model(2), {2.0, 1.0});
  CHECK(a.x == doctest::Approx(3.0));
  CHECK(a.y == doctest::Approx(4.0));
  const Vec2 b = drift_binomial(model(3), {1.0, 1.0});
  CHECK(b.x == doctest::Approx(-2.0));
  CHECK(b.y == doctest::Approx(2.0));
  const Vec2 c = drift_binomial(model(2, {{{1, 0}, {1.0, 0.0}}}), {2.0, 1.0});
  CHECK(c.x == doctest::Approx(5.0));
  CHECK(c.y == doctest::Approx(5.0));
}

TEST_CASE("polar drift on hand-computed points") {
  const Vec2 a = drift_polar(model(2), {2.0, 1.0});
  CHECK(std::abs(a.x - 3.0) <= 1e-12 * 3.0);
  CHECK(std::abs(a.y - 4.0) <= 1e-12 * 4.0);
  const Vec2 b = drift_polar(model(3), {1.0, 1.0});
  CHECK(std::abs(b.x + 2.0) <= 1e-12);
  CHECK(std::abs(b.y - 2.0) <= 1e-12);
  for (int n = 2; n <= 6; ++n) {
    const Vec2 axis = drift_polar(model(n), {1.7, 0.0});
    CHECK(axis.x == doctest::Approx(std::pow(1.7, n)));
    CHECK(axis.y == 0.0);
  }
  CHECK_THROWS_AS((void)drift_polar(model(2), {0.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS((void)drift_polar(model(2), {-1.0, 1.0}), std::domain_error);
}

TEST_CASE("binomial and polar drift agree with the complex oracle") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ux(1e-3, 1e3), uslope(-10.0, 10.0);
  double worst = 0.0;
  for (int f = 0; f < 20; ++f) {
    const ModelParams p = random_model(rng);
    const double s = p.coeff_l1();
    for (int i = 0; i < 5000; ++i) {
      const double x = ux(rng);
      const double y = uslope(rng) * x;
      const double r = std::hypot(x, y);
      const double scale = std::pow(r, p.n) + s * std::pow(r, p.n - 1);
      const Vec2 a = drift_binomial(p, {x, y});
      const Vec2 b = drift_polar(p, {x, y});
      const std::complex<double> o = oracle_drift(p, x, y);
      worst = std::max({worst, std::abs(a.x - b.x) / scale, std::abs(a.y - b.y) / scale,
                        std::abs(a.x - o.real()) / scale, std::abs(a.y - o.imag()) / scale});
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("binomial drift reports overflow instead of crashing") {
  const Vec2 v = drift_binomial(model(5), {1e80, 1e80});
  CHECK(v.overflow());
}

TEST_CASE("epsilon examples") {
  CHECK(epsilon_of(2, 0.5) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(epsilon_of(4, 1e-9) == doctest::Approx(1.0));
  CHECK(epsilon_of(3, 0.2) == doctest::Approx(std::cos(3.0 * std::atan(0.2))));
  CHECK_THROWS_AS((void)epsilon_of(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)epsilon_of(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)epsilon_of(3, std::tan(std::numbers::pi / 6.0)), std::invalid_argument);
}

TEST_CASE("x_star examples") {
  const PerturbationBound zero = x_star_of(model(2), 0.5);
  CHECK(zero.x_star == 1.0);
  CHECK(zero.C == 0.0);
  const PerturbationBound lin = x_star_of(model(2, {{{1, 0}, {1.0, 0.0}}}), 0.5);
  CHECK(lin.x_star == doctest::Approx(4.0));
  CHECK(lin.C == doctest::Approx(1.0));
  const PerturbationBound two = x_star_of(model(2, {{{1, 0}, {2.0, 0.0}}, {{0, 1}, {3.0, 0.0}}}), 0.6);
  CHECK(two.x_star == doctest::Approx(2.0 * 5.0 / 0.6));
  CHECK(two.C == doctest::Approx(5.0));
}

TEST_CASE("cone lower bound on the first drift component") {
  std::mt19937_64 rng(99);
  for (int f = 0; f < 10; ++f) {
    const ModelParams p = random_model(rng);
    const double alpha = 0.5 * max_half_slope(p.n);
    const double eps = epsilon_of(p.n, alpha);
    const double xs = x_star_of(p, eps).x_star;
    std::uniform_real_distribution<double> ux(xs, 50.0 * xs), ut(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double x = ux(rng);
      const double y = ut(rng) * alpha * x;
      const double r = std::hypot(x, y);
      const Vec2 b = drift_binomial(p, {x, y});
      CHECK(b.x >= 0.5 * eps * std::pow(r, p.n) * (1.0 - 1e-12));
      CHECK(0.5 * eps * std::pow(r, p.n) >= 0.5 * eps * std::pow(x, p.n));
    }
  }
}

TEST_CASE("perturbation bound outside the x_star ball") {
  std::mt19937_64 rng(7);
  for (int f = 0; f < 10; ++f) {
    const ModelParams p = random_model(rng);
    const PerturbationBound pb = x_star_of(p, 0.5);
    std::uniform_real_distribution<double> ur(pb.x_star, 100.0 * pb.x_star),
        uphi(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 1000; ++i) {
      const double r = ur(rng), phi = uphi(rng);
      const Vec2 f_hat = perturbation(p, {r * std::cos(phi), r * std::sin(phi)});
      CHECK(std::abs(f_hat.y) <= pb.C * std::pow(r, p.n - 1) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("sine constants") {
  const SineConstants two = sine_constants(2);
  CHECK(std::abs(two.b_n - 1.0) <= 1e-10);
  CHECK(std::abs(two.a_n - 1.0) <= 1e-10);
  for (int n = 2; n <= 8; ++n) {
    const SineConstants sc = sine_constants(n);
    const auto g = [n](double z) { return std::sin(n * std::atan(z)) - z; };
    CHECK(std::abs(g(sc.b_n)) <= 1e-10);
    CHECK(sc.b_n == doctest::Approx(newton_root(n)).epsilon(1e-9));
    CHECK(sc.a_n == doctest::Approx(std::sin(n * std::atan(sc.b_n))));
    CHECK(sc.a_n > 0.0);
    CHECK(sc.a_n <= 1.0);
    for (int i = 1; i <= 100; ++i) {
      const double z = sc.b_n * (1.0 - 1e-6) * i / 101.0;
      CHECK(g(z) > 0.0);
    }
  }
  CHECK(sine_constants(3).b_n == doctest::Approx(0.853325).epsilon(1e-5));
}

TEST_CASE("in_cone examples") {
  ConeParams cone;
  cone.x_star = 4.0;
  cone.alpha = 0.5;
  CHECK(in_cone(cone, {10.0, 4.0}));
  CHECK_FALSE(in_cone(cone, {10.0, 6.0}));
  CHECK_FALSE(in_cone(cone, {3.0, 0.0}));
}

TEST_CASE("cone construction") {
  const ConeParams cone = ConeParams::make(model(3), 0.2, 1.0, 20.0);
  CHECK(cone.x1 == 19.0);
  CHECK(cone.x_star == 1.0);
  const double eps = std::cos(3.0 * std::atan(0.2));
  CHECK(cone.epsilon == doctest::Approx(eps));
  CHECK(cone.T == doctest::Approx(1.0 / (0.5 * eps * 2.0 * 19.0 * 19.0)));
  CHECK(cone.segment_half_width() == doctest::Approx(std::tan(std::numbers::pi / 6.0) * 20.0));
  CHECK(cone.trapping_condition_holds());
  CHECK_THROWS_AS((void)ConeParams::make(model(3), 0.2, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS((void)ConeParams::make(model(3), 0.2, 0.0, 20.0), std::invalid_argument);
  CHECK_THROWS_AS((void)ConeParams::make(model(3), 0.7, 1.0, 20.0), std::invalid_argument);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(model(1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(model(2, {{{1, 1}, {1.0, 0.0}}}).validate(), std::invalid_argument);
  CHECK_NOTHROW(model(3, {{{1, 1}, {1.0, 0.0}}}).validate());
  ModelParams neg = model(2);
  neg.sigma = -1.0;
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}
