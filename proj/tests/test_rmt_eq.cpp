#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "critasym/errors.hpp"
#include "critasym/rmt_eq.hpp"
#include "doctest.h"

using namespace critasym;

namespace {

// int log|s - y| dmu(y) split at s, by tanh-sinh on each side.
double oracle_log_potential(const EquilibriumMeasure& mu, double s) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const Interval iv = mu.intervals.front();
  auto f = [&](double y) { return std::log(std::abs(s - y)) * mu.density(y); };
  if (s <= iv.a || s >= iv.b) return ts.integrate(f, iv.a, iv.b, 1e-13);
  return ts.integrate(f, iv.a, s, 1e-13) + ts.integrate(f, s, iv.b, 1e-13);
}

double oracle_mass(const EquilibriumMeasure& mu) {
  const Interval iv = mu.intervals.front();
  // y = c + r sin(th) removes the square-root endpoints.
  const double c = 0.5 * (iv.a + iv.b), r = 0.5 * (iv.b - iv.a);
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double th) { return mu.density(c + r * std::sin(th)) * r * std::cos(th); }, -std::numbers::pi / 2,
      std::numbers::pi / 2, 8, 1e-14);
}

void check_nonnegative(const EquilibriumMeasure& mu) {
  const Interval iv = mu.intervals.front();
  for (int i = 0; i <= 1000; ++i) CHECK(mu.density(iv.a + (iv.b - iv.a) * i / 1000.0) >= -1e-14);
}

}  // namespace

TEST_CASE("quartic field") {
  for (double s : {-1.3, 0.0, 2.5}) {
    const auto v = field_eval({0.0, 0.0}, s);
    CHECK(v.V == doctest::Approx(s * s / 2).epsilon(1e-15));
    CHECK(v.V1 == doctest::Approx(s).epsilon(1e-15));
    CHECK(v.V2 == doctest::Approx(1.0));
  }
  const Polynomial V9 = potential({0.3, 9.0});
  CHECK(std::abs(V9.derivative()(4.0 / 3)) < 1e-13);
  CHECK(std::abs(V9.derivative().derivative().derivative()(4.0 / 3)) < 1e-13);
  for (double u : {0.4, 1.7, 3.0}) CHECK(V9(4.0 / 3 + u) == doctest::Approx(V9(4.0 / 3 - u)).epsilon(1e-13));
  CHECK(field_eval({0.0, 1.0}, 2.0).V == doctest::Approx(16.0 / 20 - 32.0 / 15 + 4.0 / 5 + 16.0 / 5).epsilon(1e-15));
  CHECK(x_star() == doctest::Approx(-std::log(245.0 / 9)).epsilon(1e-15));
}

TEST_CASE("Gaussian family") {
  const auto mu0 = measure_gaussian(0.0);
  CHECK(mu0.intervals.front().a == -2.0);
  CHECK(mu0.intervals.front().b == 2.0);
  CHECK(mu0.density(0.7) == doctest::Approx(std::sqrt(4 - 0.49) / (2 * std::numbers::pi)).epsilon(1e-15));
  for (double x : {-1.0, 0.0, 1.0}) {
    const auto mu = measure_gaussian(x);
    CHECK(std::abs(mu.mass() - 1.0) < 1e-12);
    CHECK(std::abs(oracle_mass(mu) - 1.0) < 1e-12);
    check_nonnegative(mu);
    const auto vr = variational_residual(mu, {x, 0.0}, default_probe_grid(mu));
    CHECK(vr.eq_residual < 1e-8);
    CHECK(vr.ineq_margin >= 0.0);
    // Rescaling s -> e^{-x/2} s shifts the constant by -x.
    CHECK(vr.ell == doctest::Approx(-1.0 - x).epsilon(1e-10));
    for (double s : {-2.5, -0.3, 0.9, 4.0}) {
      CHECK(mu.log_potential(s) == doctest::Approx(oracle_log_potential(mu, s)).epsilon(1e-10));
    }
  }
  // Semicircle log potential inside the support: s^2/4 - 1/2.
  CHECK(mu0.log_potential(1.1) == doctest::Approx(1.21 / 4 - 0.5).epsilon(1e-13));
}

TEST_CASE("x = 0 family") {
  for (double t : {0.25, 0.5, 1.0}) {
    const auto mu = measure_line_t(t);
    CHECK(std::abs(mu.mass() - 1.0) < 1e-12);
    CHECK(std::abs(oracle_mass(mu) - 1.0) < 1e-12);
    check_nonnegative(mu);
    const auto vr = variational_residual(mu, {0.0, t}, default_probe_grid(mu));
    CHECK(vr.eq_residual < 1e-8);
    CHECK(vr.ineq_margin >= -1e-12);
    CHECK(mu.log_potential(0.4) == doctest::Approx(oracle_log_potential(mu, 0.4)).epsilon(1e-10));
  }
  const auto one = measure_line_t(1.0);
  CHECK(std::abs(one.h(2.0)) < 1e-15);
  // Quadratic zero of h at the endpoint: density ~ delta^(5/2).
  const double r1 = one.density(2.0 - 1e-3) / std::pow(1e-3, 2.5);
  const double r2 = one.density(2.0 - 1e-4) / std::pow(1e-4, 2.5);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-3));
  CHECK(measure_line_t(0.5).h(2.0) > 0.0);
  CHECK(measure_line_t(0.5).h(2.0) == doctest::Approx(5.0 / (2 * std::numbers::pi * 10)).epsilon(1e-14));
  CHECK_THROWS_AS(measure_line_t(0.0), DomainError);
  CHECK_THROWS_AS(measure_line_t(1.5), DomainError);
}

TEST_CASE("t = 9 family") {
  const double xs = x_star();
  CHECK(t9_b(xs) == doctest::Approx(2.0 / 3 * std::sqrt(35.0)).epsilon(1e-12));
  CHECK(std::abs(t9_C(xs)) < 1e-10);
  for (double x : {xs - 2, xs - 1, xs}) {
    const auto mu = measure_t9(x);
    CHECK(std::abs(mu.mass() - 1.0) < 1e-10);
    CHECK(std::abs(oracle_mass(mu) - 1.0) < 1e-10);
    check_nonnegative(mu);
    const auto vr = variational_residual(mu, {x, 9.0}, default_probe_grid(mu));
    CHECK(vr.eq_residual < 1e-6);
    CHECK(vr.ineq_margin >= 0.0);
  }
  const auto reg = measure_t9(xs - 1);
  CHECK(t9_C(xs - 1) > 0.0);
  double hmin = HUGE_VAL;
  for (int i = 0; i <= 2000; ++i) {
    const Interval iv = reg.intervals.front();
    hmin = std::min(hmin, reg.h(iv.a + (iv.b - iv.a) * i / 2000.0));
  }
  CHECK(hmin > 0.0);
  CHECK_THROWS_AS(measure_t9(xs + 0.1), DomainError);
}

TEST_CASE("variational residual detects a wrong measure") {
  const auto mu = measure_gaussian(0.0);
  CHECK(variational_residual(mu, {0.0, 1.0}, default_probe_grid(mu)).eq_residual > 1e-2);
  CHECK_THROWS_AS(variational_residual(mu, {0.0, 0.0}, {5.0, 6.0}), DomainError);
}

TEST_CASE("one-cut endpoints") {
  const auto g = solve_onecut_endpoints(Polynomial({0.0, 0.0, 0.5}));
  CHECK(g.a == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(g.b == doctest::Approx(2.0).epsilon(1e-12));
  const double xs = x_star();
  for (double x : {xs - 2, xs - 1, xs}) {
    const auto iv = solve_onecut_endpoints(QuarticField{x, 9.0});
    CHECK(std::abs(iv.a - (4.0 / 3 - t9_b(x))) < 1e-8);
    CHECK(std::abs(iv.b - (4.0 / 3 + t9_b(x))) < 1e-8);
    const auto [f1, f2] = onecut_conditions(potential({x, 9.0}), iv.a, iv.b);
    CHECK(std::abs(f1) < 1e-10);
    CHECK(std::abs(f2) < 1e-10);
    const auto mu = onecut_measure(potential({x, 9.0}), iv);
    CHECK(std::abs(mu.mass() - 1.0) < 1e-8);
  }
  // The solved density reproduces the printed one.
  const auto mu = onecut_measure(potential({xs - 1, 9.0}), solve_onecut_endpoints(QuarticField{xs - 1, 9.0}));
  CHECK(mu.density(0.5) == doctest::Approx(measure_t9(xs - 1).density(0.5)).epsilon(1e-8));
  CHECK_THROWS_AS(solve_onecut_endpoints(QuarticField{xs + 1, 9.0}), NotOneCutError);
  CHECK_THROWS_AS(solve_onecut_endpoints(Polynomial({0.0, 1.0, 0.0, 1.0})), DomainError);
}

TEST_CASE("singularity classification") {
  const auto e = classify(measure_line_t(1.0), QuarticField{0.0, 1.0});
  CHECK(e.kind == SingularityKind::edge_III);
  CHECK(e.location == 2.0);
  CHECK_FALSE(e.ambiguous);

  const auto i = classify(measure_t9(x_star()), QuarticField{x_star(), 9.0});
  CHECK(i.kind == SingularityKind::interior_II);
  CHECK(i.location == doctest::Approx(4.0 / 3).epsilon(1e-6));

  const auto n = classify(measure_t9(x_star() - 1), QuarticField{x_star() - 1, 9.0});
  CHECK(n.kind == SingularityKind::none);
  CHECK(n.margin > 1e-6);
  CHECK(to_string(SingularityKind::exterior_I) == "exterior_I");
}

TEST_CASE("phase diagram") {
  CHECK(rmt_phase_cell(0.0, 1.0).cls == "edge_III");
  CHECK(rmt_phase_cell(-1.0, 0.5).cls == "one_cut");
  CHECK(rmt_phase_cell(0.0, 5.0).cls == "not_one_cut");
  const auto bad = rmt_phase_cell(0.0, -1.0);  // negative quartic coefficient
  CHECK(bad.cls == "failure");
  CHECK_FALSE(bad.message.empty());

  const double xs = x_star();
  const auto pd = rmt_phase_diagram({xs - 1.0, xs - 0.25, xs + 0.25, xs + 1.0}, {9.0});
  REQUIRE(pd.curves.size() == 1);
  CHECK(std::abs(pd.curves[0].x - xs) < 1e-8);
  CHECK(pd.curves[0].kind == "interior_II");
  CHECK(pd.cells[1].cls == "one_cut");
  CHECK(pd.cells[2].cls == "not_one_cut");

  // Off the t = 9 line the right-hand curve is of exterior type.
  const auto right = rmt_phase_diagram({-0.25, 1.0}, {3.0});
  REQUIRE(right.curves.size() == 1);
  CHECK(right.curves[0].kind == "exterior_I");

  for (double t : {0.5, 3.0}) {
    double prev = 0.0;
    for (double x : {2.0, 1.0, 0.0, -1.0, -2.0}) {
      const auto c = rmt_phase_cell(x, t);
      if (c.cls == "failure" || c.cls == "not_one_cut") continue;
      CHECK(c.b - c.a > prev);
      prev = c.b - c.a;
    }
  }
  CHECK_THROWS_AS(rmt_phase_diagram({1.0, 0.0}, {1.0}), DomainError);
}
