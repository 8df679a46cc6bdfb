#include <cmath>
#include <numbers>
#include <thread>

#include "critasym/errors.hpp"
#include "critasym/kdv_direct.hpp"
#include "doctest.h"

using namespace critasym;

namespace {

double soliton(double x, double t) {
  const double c = std::cosh(x - 4.0 * t + 2.0);
  return 2.0 / (c * c);
}

}  // namespace

TEST_CASE("zero data is a fixed point") {
  const auto f = solve_kdv([](double) { return 0.0; }, 0.5, 0.3, 10.0, 8);
  for (double v : f.u) CHECK(v == 0.0);
  CHECK(f.mass_drift == 0.0);
  CHECK(f.x.size() == 256u);
  CHECK(f.x.front() == -10.0);
}

TEST_CASE("one-soliton propagation") {
  // 2 kappa^2 sech^2(kappa (x - 4 kappa^2 t - x0)) with kappa = 1 solves KdV at eps = 1.
  const auto f = solve_kdv([](double x) { return soliton(x, 0.0); }, 1.0, 1.0, 15.0, 9);
  double err = 0.0;
  for (std::size_t j = 0; j < f.x.size(); ++j) err = std::max(err, std::abs(f.u[j] - soliton(f.x[j], 1.0)));
  CHECK(err < 1e-4);
  CHECK(f.mass_drift < 1e-8);
  CHECK(f.l2_drift < 1e-8);
  CHECK(f.edge_max < 1e-8);
  CHECK(f.steps > 0);
}

TEST_CASE("sech2 data before breaking follows the Hopf solution") {
  const auto d = make_sech2_data();
  const double t = 0.1;
  auto hopf = [&](double x) { return hopf_solve(x, t, d); };
  double prev = HUGE_VAL;
  for (auto [eps, m] : {std::pair{0.2, 10}, {0.1, 11}, {0.05, 12}}) {
    const auto f = solve_kdv(d, eps, t, 15.0, m);
    const double err = max_deviation(f, hopf, -8.0, 8.0);
    if (eps == 0.1) CHECK(err < 0.05);
    CHECK(err < prev);
    prev = err;
    CHECK(f.mass_drift < 1e-8);
    CHECK(f.l2_drift < 1e-8);
  }
}

TEST_CASE("time tolerance convergence") {
  const auto d = make_sech2_data();
  KdVOptions a, b;
  a.tol = 1e-9;
  b.tol = 0.5e-9;
  const auto fa = solve_kdv(d, 0.1, 0.25, 15.0, 11, a);
  const auto fb = solve_kdv(d, 0.1, 0.25, 15.0, 11, b);
  double diff = 0.0;
  for (std::size_t j = 0; j < fa.u.size(); ++j) diff = std::max(diff, std::abs(fa.u[j] - fb.u[j]));
  CHECK(diff < 1e-6);
}

TEST_CASE("concurrent solves are deterministic") {
  const auto d = make_sech2_data();
  const auto ref = solve_kdv(d, 0.2, 0.2, 15.0, 10);
  KdVField a, b;
  std::thread ta([&] { a = solve_kdv(d, 0.2, 0.2, 15.0, 10); });
  std::thread tb([&] { b = solve_kdv(d, 0.2, 0.2, 15.0, 10); });
  ta.join();
  tb.join();
  CHECK(a.u == ref.u);
  CHECK(b.u == ref.u);
}

TEST_CASE("probe") {
  const double P = 3.0;
  const auto f = solve_kdv([&](double x) { return std::cos(std::numbers::pi * x / P) * 1e-9; }, 1.0, 0.0, P, 6);
  const double dx = 2 * P / 64;
  for (double x : {-2.9, 0.1, 1.0 + 0.5 * dx}) {
    CHECK(std::abs(probe(f, x) - 1e-9 * std::cos(std::numbers::pi * x / P)) < 1e-21);
  }
  CHECK(probe(f, f.x[17]) == doctest::Approx(f.u[17]).epsilon(1e-12));

  KdVField c = f;
  std::fill(c.u.begin(), c.u.end(), 0.75);
  for (double x : {-1.3, 0.0, 2.2}) CHECK(probe(c, x) == doctest::Approx(0.75).epsilon(1e-14));

  const auto s = solve_kdv([](double x) { return soliton(x, 0.0); }, 1.0, 0.0, 15.0, 9);
  CHECK(probe(s, -1.234) == doctest::Approx(soliton(-1.234, 0.0)).epsilon(1e-10));
}

TEST_CASE("error reporting") {
  const auto d = make_sech2_data();
  CHECK_THROWS_AS(solve_kdv(d, 0.05, 0.1, 15.0, 8), ResolutionError);  // spacing above eps/4
  CHECK_THROWS_AS(solve_kdv([](double x) { return std::exp(-x * x / 0.0025); }, 1.0, 0.01, 15.0, 8),
                  ResolutionError);  // spectrum not resolved
  KdVOptions tight;
  tight.blowup_factor = 1e-6;
  CHECK_THROWS_AS(solve_kdv(d, 0.2, 0.1, 15.0, 10, tight), StabilityError);
  CHECK_THROWS_AS(solve_kdv(d, 0.2, 0.1, 3.0, 9), DomainError);  // wrap-around not negligible
  CHECK_THROWS_AS(solve_kdv(d, -0.2, 0.1, 15.0, 9), DomainError);
  CHECK_THROWS_AS(solve_kdv(d, 0.2, 0.1, 15.0, 17), DomainError);
}
