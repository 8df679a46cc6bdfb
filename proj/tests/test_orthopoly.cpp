#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/random/sobol.hpp>
#include <cmath>
#include <numbers>

#include "critasym/errors.hpp"
#include "critasym/kdv_asym.hpp"
#include "critasym/orthopoly.hpp"
#include "doctest.h"

using namespace critasym;
using mp = boost::multiprecision::cpp_bin_float_50;

namespace {

mp det(std::vector<std::vector<mp>> a) {
  const std::size_t n = a.size();
  mp d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (abs(a[r][c]) > abs(a[piv][c])) piv = r;
    }
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const mp f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return d;
}

// Hankel determinant of order n; `shift` replaces the last column by m_{i+n}.
mp hankel(const std::vector<mp>& m, int n, bool shift) {
  if (n == 0) return 1;
  std::vector<std::vector<mp>> a(n, std::vector<mp>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = m[i + j + (shift && j == n - 1 ? 1 : 0)];
  }
  return det(a);
}

}  // namespace

TEST_CASE("Gaussian recurrence") {
  const auto t = compute_recurrence(Polynomial({0.0, 0.0, 0.5}), 20, 20);
  for (int n = 1; n <= 20; ++n) CHECK(std::abs(t.gamma[n] - std::sqrt(n / 20.0)) < 1e-10);
  for (int n = 0; n <= 20; ++n) CHECK(std::abs(t.beta[n]) < 1e-10);
  for (int n = 0; n <= 20; ++n) CHECK(t.kappa[n] > 0.0);
  CHECK(t.digits >= 50);
  // kappa_0^-2 = int exp(-10 s^2) ds.
  CHECK(std::exp(-2.0 * t.log_kappa[0]) == doctest::Approx(std::sqrt(std::numbers::pi / 10.0)).epsilon(1e-13));
}

TEST_CASE("even weights have vanishing beta") {
  const auto t = compute_recurrence(Polynomial({0.0, 0.0, -1.0, 0.0, 0.25}), 10, 20);
  for (double b : t.beta) CHECK(std::abs(b) < 1e-10);
  for (int n = 1; n <= 20; ++n) CHECK(t.gamma[n] > 0.0);
}

TEST_CASE("Hankel determinant oracle") {
  const int N = 8;
  const Polynomial V = potential({0.0, 1.0});
  // N V > 4000 outside [-10, 12]: the dropped tails are far below 50 digits.
  boost::math::quadrature::tanh_sinh<mp> ts;
  std::vector<mp> m;
  for (int k = 0; k <= 10; ++k) {
    m.push_back(ts.integrate([&](mp s) {
      mp v = 0;
      for (auto it = V.coeffs().rbegin(); it != V.coeffs().rend(); ++it) v = v * s + *it;
      return pow(s, k) * exp(-N * v);
    }, mp(-10), mp(12)));
  }
  const auto t = compute_recurrence(V, N, 4);
  for (int n = 1; n <= 4; ++n) {
    const mp g2 = hankel(m, n + 1, false) * hankel(m, n - 1, false) / pow(hankel(m, n, false), 2);
    CHECK(std::abs(t.gamma[n] - static_cast<double>(sqrt(g2))) < 1e-12);
  }
  for (int n = 0; n <= 4; ++n) {
    const mp b = hankel(m, n + 1, true) / hankel(m, n + 1, false) - (n == 0 ? mp(0) : hankel(m, n, true) / hankel(m, n, false));
    CHECK(std::abs(t.beta[n] - static_cast<double>(b)) < 1e-12);
  }
  CHECK(std::abs(-2.0 * t.log_kappa[0] - static_cast<double>(log(m[0]))) < 1e-12);
}

TEST_CASE("orthonormality under an independent quadrature") {
  const QuarticField f{x_star() - 1.0, 9.0};
  const auto t = compute_recurrence(f, 12, 12);
  const Polynomial V = potential(f);
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (int j = 0; j <= 12; ++j) {
    for (int k = j; k <= 12; ++k) {
      const double ip = GK::integrate(
          [&](double s) {
            const auto p = orthonormal_values(t, 12, s);
            return p[j] * p[k] * std::exp(-12.0 * V(s));
          },
          t.lo, t.hi, 15, 1e-13);
      CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("node doubling invariance") {
  for (const QuarticField f : {QuarticField{0.0, 1.0}, QuarticField{x_star() - 1.0, 9.0}}) {
    const auto a = compute_recurrence(f, 24, 24);
    RecurrenceOptions o;
    o.panels = 2 * (64 + 4 * 24);
    const auto b = compute_recurrence(f, 24, 24, o);
    for (int n = 1; n <= 24; ++n) CHECK(std::abs(a.gamma[n] - b.gamma[n]) < 1e-10);
    for (int n = 0; n <= 24; ++n) CHECK(std::abs(a.beta[n] - b.beta[n]) < 1e-10);
    CHECK(a.boundary_mass < 1e-30);
  }
}

TEST_CASE("recurrence errors") {
  CHECK_THROWS_AS(compute_recurrence(Polynomial({0.0, 1.0, 0.0, 1.0}), 10, 5), DomainError);
  CHECK_THROWS_AS(compute_recurrence(Polynomial({0.0, 0.0, -1.0}), 10, 5), DomainError);
  CHECK_THROWS_AS(compute_recurrence(Polynomial({0.0, 0.0, 0.5}), 10, 21), DomainError);
  CHECK_THROWS_AS(compute_recurrence(Polynomial({0.0, 0.0, 0.5}), 40, 65), DomainError);
  RecurrenceOptions coarse;
  coarse.panels = 1;  // 30 nodes cannot carry 40 orthogonal polynomials
  try {
    compute_recurrence(Polynomial({0.0, 0.0, 0.5}), 20, 40, coarse);
    FAIL("expected a precision error");
  } catch (const PrecisionError& e) {
    CHECK(e.failing_n() == 30);
  }
}

TEST_CASE("partition function") {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const Polynomial V = potential({0.0, 1.0});
  const auto t = compute_recurrence(V, 3, 4);
  const double z1 = GK::integrate([&](double s) { return std::exp(-3.0 * V(s)); }, -12.0, 14.0, 15, 1e-14);
  CHECK(partition_log(t, 1).logZ == doctest::Approx(std::log(z1)).epsilon(1e-10));
  CHECK(partition_log(t, 0).logZ == 0.0);

  const auto g2 = compute_recurrence(Polynomial({0.0, 0.0, 0.5}), 2, 2);
  const double z2 = GK::integrate(
      [](double x) {
        return GK::integrate([x](double y) { return (x - y) * (x - y) * std::exp(-(x * x + y * y)); }, -9.0, 9.0,
                             15, 1e-14);
      },
      -9.0, 9.0, 15, 1e-13);
  CHECK(partition_log(g2, 2).logZ == doctest::Approx(std::log(z2)).epsilon(1e-10));

  // Z_3 = (2 pi / N)^(3/2) E[Delta^2] with lambda_i ~ N(0, 1/N), by Sobol QMC.
  const int N = 3;
  const auto g3 = compute_recurrence(Polynomial({0.0, 0.0, 0.5}), N, 3);
  boost::random::sobol qrng(3);
  const boost::math::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(N));
  const int samples = 1 << 22;
  double acc = 0.0;
  std::vector<double> u(3);
  for (int i = 0; i < samples; ++i) {
    for (double& ui : u) ui = (static_cast<double>(qrng()) + 0.5) / (static_cast<double>(qrng.max()) + 1.0);
    const double a = quantile(normal, u[0]), b = quantile(normal, u[1]), c = quantile(normal, u[2]);
    const double d = (a - b) * (a - c) * (b - c);
    acc += d * d;
  }
  const double z3 = std::pow(2.0 * std::numbers::pi / N, 1.5) * acc / samples;
  CHECK(std::abs(std::exp(partition_log(g3, 3).logZ) / z3 - 1.0) < 1e-3);
  CHECK_THROWS_AS(partition_log(g3, 5), DomainError);
}

TEST_CASE("regular one-cut limits") {
  CHECK(asym_onecut(-2.0, 2.0).gamma == 1.0);
  CHECK(asym_onecut(-2.0, 2.0).beta == 0.0);
  const double b = t9_b(x_star() - 1.0);
  const auto l = asym_onecut(4.0 / 3 - b, 4.0 / 3 + b);
  CHECK(l.gamma == doctest::Approx(b / 2).epsilon(1e-15));
  CHECK(l.beta == doctest::Approx(4.0 / 3).epsilon(1e-15));
  CHECK(asym_onecut(-0.7, 0.7).beta == 0.0);
  CHECK_THROWS_AS(asym_onecut(1.0, 1.0), DomainError);
}

TEST_CASE("interior asymptotics") {
  const auto hm = solve_hastings_mcleod();
  const auto lit = interior_critical_t9();
  CHECK((lit.b + lit.a) / (lit.b - lit.a) == doctest::Approx(2.0 / std::sqrt(35.0)).epsilon(1e-12));
  const auto r = asym_interior(x_star(), 16, lit, hm);
  CHECK(r.theta == doctest::Approx(std::asin(2.0 / std::sqrt(35.0))).epsilon(1e-12));
  CHECK(r.s == 0.0);
  CHECK_FALSE(r.outside_scaling);
  for (int n : {10, 100, 1000}) CHECK(asym_interior(x_star(), n, lit, hm).s == 0.0);
  // Fixed x < x*: s grows like n^(2/3), q decays, the regular limit returns.
  const auto far = asym_interior(x_star() - 0.5, 1000000, lit, hm);
  CHECK(far.outside_scaling);
  CHECK(std::abs(far.gamma - (lit.b - lit.a) / 4) < 1e-12);
  CHECK(std::abs(far.beta - (lit.b + lit.a) / 2) < 1e-12);

  // About s* the field is symmetric: beta is constant and the cosine phase alternates.
  const auto cen = interior_critical_t9(4.0 / 3);
  CHECK(cen.omega == doctest::Approx(0.5).epsilon(1e-12));
  for (int n : {32, 33}) {
    const auto t = compute_recurrence(QuarticField{x_star(), 9.0}, n, n);
    const auto a = asym_interior(x_star(), n, cen, hm);
    CHECK(std::abs(t.gamma[n] - a.gamma) < 1e-3);
    CHECK(std::abs(t.beta[n] - a.beta) < 1e-10);
  }

  InteriorCritical bad = lit;
  bad.origin = 10.0;
  CHECK_THROWS_AS(asym_interior(x_star(), 8, bad, hm), DomainError);
}

TEST_CASE("edge asymptotics") {
  const auto k = edge_constants();
  CHECK(k.c == std::pow(6.0, 2.0 / 7.0));
  CHECK(k.c1 == std::pow(6.0, -1.0 / 7.0));
  CHECK(k.c2 == 2.0 * std::pow(6.0, -3.0 / 7.0));
  PI2Cache cache;
  for (int n : {10, 100, 10000}) {
    const auto e = asym_edge(0.0, 1.0, n, cache);
    CHECK(e.X == 0.0);
    CHECK(e.T == 0.0);
    CHECK(e.U == doctest::Approx(-0.4151721005).epsilon(1e-9));
    CHECK(e.gamma == doctest::Approx(1.0 + e.U / (2.0 * k.c) * std::pow(n, -2.0 / 7.0)).epsilon(1e-15));
  }
  const auto e = asym_edge(1e-4, 1.0 + 1e-3, 10000, cache);
  CHECK(std::abs((e.gamma - 1.0) - e.beta / 2.0) <= 2.3e-16);
  CHECK_THROWS_AS(asym_edge(1.0, 1.0, 10000, cache), DomainError);
}

TEST_CASE("conjectured exterior sum") {
  ExteriorParams p;
  p.a = -1.0;
  p.b = 3.0;
  p.c1 = 0.25;
  p.c2 = [](double, int) { return 0.0; };
  p.c3 = [](int) { return 400.0; };
  const auto quiet = conjectured_exterior(0.3, 100.0, p);
  CHECK(quiet.gamma == 1.0);
  CHECK(quiet.beta == 1.0);
  CHECK(quiet.conjectural);

  p.c3 = [](int k) { return k == 0 ? 0.0 : 400.0 + k; };
  const auto one = conjectured_exterior(0.3, 100.0, p);
  CHECK(one.gamma == doctest::Approx(1.0 + 0.25).epsilon(1e-15));
  CHECK(one.beta == doctest::Approx(1.0 + 0.25).epsilon(1e-15));

  // Matched to the trailing-edge sum: c2 = (1/2 - y + k)/2 and eps = 1/n.
  TrailingEdgeModel m;
  m.gamma = 1.7;
  const double lg = std::log(m.gamma), ls = 0.5 * std::log(2.0 * std::numbers::pi);
  p.c2 = [](double y, int k) { return 0.5 * (0.5 - y + k); };
  p.c3 = [=](int k) { return -(ls + log_hk(k)) - (k + 0.5) * lg; };
  for (double n : {64.0, 1024.0, 65536.0}) {
    for (double y : {-2.0, 0.0, 1.5, 4.0}) {
      const double a = conjectured_exterior(y, n, p).sum;
      const double b = trailing_edge_sum(y, 1.0 / n, m);
      CHECK(a == b);
    }
  }
  CHECK_THROWS_AS(conjectured_exterior(0.0, 1.0, p), DomainError);
  p.c3 = nullptr;
  CHECK_THROWS_AS(conjectured_exterior(0.0, 10.0, p), DomainError);
}

TEST_CASE("asymptotic comparison tables") {
  const auto g = compare_asymptotics({0.7, 0.0}, 0, 4, 16, AsymKind::regular);
  REQUIRE(g.rows.size() == 13u);
  for (const auto& r : g.rows) {
    CHECK(r.err_gamma < 1e-13);
    CHECK(r.err_beta < 1e-13);
  }
  const auto e = compare_asymptotics({0.0, 1.0}, 0, 16, 32, AsymKind::edge);
  CHECK(e.deviation_exponent < -0.2);
  CHECK(e.deviation_exponent > -0.4);
  CHECK(e.rows.back().err_gamma < e.rows.front().err_gamma);

  CHECK(loglog_slope({1, 2, 4, 8}, {1.0, 0.25, 0.0625, 0.015625}) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(std::isnan(loglog_slope({3}, {1.0})));
  CHECK_THROWS_AS(compare_asymptotics({0.0, 1.0}, 0, 5, 4, AsymKind::regular), DomainError);
  CHECK_THROWS_AS(compare_asymptotics({0.0, 1.0}, 0, 5, 6, AsymKind::interior), DomainError);
}
