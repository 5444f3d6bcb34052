#include <doctest.h>

#include <cmath>
#include <random>

#include "blowup/integrator.hpp"

using namespace blowup;

namespace {

ModelParams model(int n, double sigma = 0.0) {
  ModelParams p;
  p.n = n;
  p.sigma = sigma;
  return p;
}

IntegratorOptions axis_options(double eta) {
  IntegratorOptions o;
  o.h_max = 1e-2;
  o.eta = eta;
  o.r_blow = 1e8;
  o.t_end = 1.0;
  return o;
}

}  // namespace

TEST_CASE("deterministic blow-up time on the axis") {
  const TrajectoryRecord rec = simulate(model(2), ZeroPath{}, {10.0, 0.0}, axis_options(1e-3));
  REQUIRE(rec.outcome == Outcome::BlowUp);
  CHECK(rec.outcome_time == doctest::Approx(0.1).epsilon(0.02));
  CHECK(rec.samples.back().z.norm() >= 1e8);
  CHECK_FALSE(rec.overflow);
}

TEST_CASE("blow-up time error roughly halves with eta") {
  // Exact explosion at 1/x0; the discrete time lags by O(eta).
  const double exact = 0.1;
  double prev = 0.0;
  for (double eta : {4e-3, 2e-3, 1e-3}) {
    const TrajectoryRecord rec = simulate(model(2), ZeroPath{}, {10.0, 0.0}, axis_options(eta));
    REQUIRE(rec.outcome == Outcome::BlowUp);
    const double err = std::abs(rec.outcome_time - exact);
    if (prev > 0.0) {
      CHECK(err < prev);
      CHECK(err / prev == doctest::Approx(0.5).epsilon(0.25));
    }
    prev = err;
  }
}

TEST_CASE("monotone escape along the positive axis") {
  for (int n : {2, 3, 4}) {
    const TrajectoryRecord rec = simulate(model(n), ZeroPath{}, {3.0, 0.0}, axis_options(1e-3));
    CHECK(rec.outcome == Outcome::BlowUp);
    for (std::size_t i = 1; i < rec.samples.size(); ++i) {
      CHECK(rec.samples[i].z.x > rec.samples[i - 1].z.x);
      CHECK(rec.samples[i].t > rec.samples[i - 1].t);
    }
  }
}

TEST_CASE("the real axis is invariant without noise") {
  for (int n : {2, 3, 5}) {
    const ConeParams cone = ConeParams::make(model(n), 0.5 * std::tan(M_PI / (2 * n)), 1.0, 10.0);
    IntegratorOptions o = default_options(cone);
    o.stop_on_exit = true;
    const TrajectoryRecord rec = simulate(model(n), cone, ZeroPath{}, {10.0, 0.0}, o);
    CHECK(rec.outcome == Outcome::BlowUp);
    for (const Sample& s : rec.samples) CHECK(s.z.y == 0.0);
    CHECK_FALSE(rec.events.tau());
  }
}

TEST_CASE("a point above the axis exits through the upper edge") {
  const ConeParams cone = ConeParams::make(model(2), 0.5, 1.0, 10.0);
  IntegratorOptions o = default_options(cone);
  o.stop_on_exit = true;
  const TrajectoryRecord rec = simulate(model(2), cone, ZeroPath{}, {10.0, 2.0}, o);
  CHECK(rec.outcome == Outcome::ExitUpper);
  REQUIRE(rec.events.tau_upper);
  CHECK(*rec.events.tau_upper == rec.outcome_time);
  CHECK_FALSE(rec.events.tau_lower);
  CHECK(rec.events.nu_plus);
  CHECK(*rec.events.nu_plus <= *rec.events.tau_upper);
}

TEST_CASE("gronwall floor closed form") {
  ModelParams p = model(2);
  const ConeParams cone = ConeParams::make(p, 0.5, 1.0, 11.0);
  CHECK(cone.epsilon == doctest::Approx(0.6));
  CHECK(cone.T == doctest::Approx(1.0 / 3.0));
  CHECK(gronwall_floor(cone, 0.0) == doctest::Approx(10.0));
  for (int n : {2, 3, 4}) {
    const ConeParams c = ConeParams::make(model(n), 0.1, 1.0, 8.0);
    CHECK(gronwall_floor(c, 0.99 * c.T) / c.x1 ==
          doctest::Approx(std::pow(100.0, 1.0 / (n - 1))).epsilon(1e-9));
    CHECK_THROWS_AS((void)gronwall_floor(c, c.T), std::domain_error);
    CHECK_THROWS_AS((void)gronwall_floor(c, -1e-3), std::domain_error);
  }
}

TEST_CASE("trajectories inside the cone dominate the gronwall floor") {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int n : {2, 3, 4}) {
    ModelParams p = model(n);
    p.f_coeffs[{0, 1}] = {0.3, -0.2};
    p.f_coeffs[{n - 1, 0}] = {-0.5, 0.1};
    const double alpha = 0.5 * std::tan(M_PI / (2 * n));
    const double eps = epsilon_of(n, alpha);
    const double x0 = x_star_of(p, eps).x_star + 5.0;
    const ConeParams cone = ConeParams::make(p, alpha, 1.0, x0);
    std::uniform_real_distribution<double> uy(-alpha * x0, alpha * x0);
    for (int i = 0; i < 34; ++i) {
      IntegratorOptions o = default_options(cone);
      o.stop_on_exit = true;
      const TrajectoryRecord rec = simulate(p, cone, ZeroPath{}, {x0, uy(rng)}, o);
      for (const Sample& s : rec.samples) {
        if (s.t >= cone.T || !in_cone(cone, s.z)) break;
        CHECK(s.z.x >= 0.99 * gronwall_floor(cone, s.t));
        ++checked;
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("every step respects the drift budget") {
  const ConeParams cone = ConeParams::make(model(3, 1.0), 0.2, 1.0, 20.0);
  IntegratorOptions o = default_options(cone);
  const NoisePath path = BrownianPath(9, o.t_end);
  for (double y : {-3.0, 0.0, 0.5, 4.0}) {
    const TrajectoryRecord rec = simulate(model(3, 1.0), cone, path, {20.0, y}, o);
    CHECK(rec.max_budget_ratio <= 1.0 + 1e-12);
    CHECK(rec.min_step > 0.0);
  }
}

TEST_CASE("record invariants under noise") {
  const ModelParams p = model(3, 1.0);
  const ConeParams cone = ConeParams::make(p, 0.2, 1.0, 20.0);
  IntegratorOptions o = default_options(cone);
  o.record_stride = 3;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uy(-10.0, 10.0);
  for (int i = 0; i < 30; ++i) {
    const NoisePath path = BrownianPath(100 + i, o.t_end);
    const TrajectoryRecord rec = simulate(p, cone, path, {20.0, uy(rng)}, o);
    for (std::size_t k = 1; k < rec.samples.size(); ++k) {
      CHECK(rec.samples[k].t > rec.samples[k - 1].t);
      CHECK(rec.samples[k].z.finite());
    }
    const EventTimes& e = rec.events;
    if (e.tau_upper && e.tau_lower) CHECK(*e.tau() == std::min(*e.tau_upper, *e.tau_lower));
    if (rec.outcome == Outcome::BlowUp) CHECK(rec.samples.back().z.norm() >= o.r_blow);
    if (rec.outcome == Outcome::Survived) CHECK(rec.outcome_time == o.t_end);
  }
}

TEST_CASE("stop on exit ends at the first cone exit") {
  const ModelParams p = model(3, 1.0);
  const ConeParams cone = ConeParams::make(p, 0.2, 1.0, 20.0);
  IntegratorOptions o = default_options(cone);
  o.stop_on_exit = true;
  for (int i = 0; i < 20; ++i) {
    const NoisePath path = BrownianPath(200 + i, o.t_end);
    const TrajectoryRecord rec = simulate(p, cone, path, {20.0, 2.0 - 0.2 * i}, o);
    if (rec.outcome == Outcome::ExitUpper) {
      CHECK(rec.outcome_time == *rec.events.tau_upper);
      CHECK((!rec.events.tau_lower || *rec.events.tau_upper <= *rec.events.tau_lower));
    }
    if (rec.outcome == Outcome::ExitLower) {
      CHECK(rec.outcome_time == *rec.events.tau_lower);
      CHECK_FALSE(rec.events.tau_upper);
    }
  }
}

TEST_CASE("option validation") {
  IntegratorOptions o = axis_options(1e-3);
  CHECK_NOTHROW(o.validate({10.0, 0.0}, 1.0));
  o.r_blow = 1e3;
  CHECK_THROWS_AS(o.validate({10.0, 0.0}, 1.0), std::invalid_argument);
  o = axis_options(1e-3);
  CHECK_THROWS_AS(o.validate({10.0, 0.0}, 0.5), std::invalid_argument);
  o.eta = 0.0;
  CHECK_THROWS_AS(o.validate({10.0, 0.0}, 1.0), std::invalid_argument);
  o = axis_options(1e-3);
  o.record_stride = 0;
  CHECK_THROWS_AS(o.validate({10.0, 0.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)simulate(model(2), ZeroPath{}, {NAN, 0.0}, axis_options(1e-3)),
                  std::invalid_argument);
}
