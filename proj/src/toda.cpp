#include "critasym/toda.hpp"

#include <algorithm>
#include <Eigen/Dense>
#include <cmath>

#include "critasym/core/roots.hpp"
#include "critasym/errors.hpp"

namespace critasym {

namespace {

constexpr double kDriftLimit = 1e-6;

void check_state(const TodaState& s) {
  if (!(s.eps > 0.0)) throw DomainError("toda: eps must be positive");
  if (s.beta.empty() || s.gamma.size() != s.beta.size()) {
    throw DomainError("toda: gamma and beta must both cover n = 0..n_max");
  }
  for (std::size_t n = 1; n < s.gamma.size(); ++n) {
    if (!(s.gamma[n] > 0.0)) throw DomainError("toda: gamma_n must be positive");
  }
}

Eigen::MatrixXd jacobi_matrix(const std::vector<double>& gamma, const std::vector<double>& beta) {
  const int m = static_cast<int>(beta.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  for (int n = 0; n < m; ++n) {
    Q(n, n) = beta[n];
    if (n > 0) Q(n, n - 1) = Q(n - 1, n) = gamma[n];
  }
  return Q;
}

// Lattice state packed as (gamma_1..gamma_nmax, beta_0..beta_nmax).
using Rhs = std::function<void(const std::vector<double>& g, const std::vector<double>& b, std::vector<double>& dg,
                               std::vector<double>& db)>;

TodaState integrate(const TodaState& s0, int k, double dt, int steps, const Rhs& rhs) {
  check_state(s0);
  if (!(dt > 0.0) || steps < 0) throw DomainError("toda flow: need dt > 0 and steps >= 0");
  const std::vector<double> before = jacobi_spectrum(s0);
  TodaState s = s0;
  const std::size_t m = s.beta.size();
  std::vector<double> g1(m), b1(m), g2(m), b2(m), g3(m), b3(m), g4(m), b4(m), gt(m), bt(m);
  for (int step = 0; step < steps; ++step) {
    rhs(s.gamma, s.beta, g1, b1);
    for (std::size_t i = 0; i < m; ++i) gt[i] = s.gamma[i] + 0.5 * dt * g1[i], bt[i] = s.beta[i] + 0.5 * dt * b1[i];
    rhs(gt, bt, g2, b2);
    for (std::size_t i = 0; i < m; ++i) gt[i] = s.gamma[i] + 0.5 * dt * g2[i], bt[i] = s.beta[i] + 0.5 * dt * b2[i];
    rhs(gt, bt, g3, b3);
    for (std::size_t i = 0; i < m; ++i) gt[i] = s.gamma[i] + dt * g3[i], bt[i] = s.beta[i] + dt * b3[i];
    rhs(gt, bt, g4, b4);
    for (std::size_t i = 0; i < m; ++i) {
      s.gamma[i] += dt / 6.0 * (g1[i] + 2.0 * g2[i] + 2.0 * g3[i] + g4[i]);
      s.beta[i] += dt / 6.0 * (b1[i] + 2.0 * b2[i] + 2.0 * b3[i] + b4[i]);
    }
  }
  s.gamma[0] = 0.0;
  for (std::size_t n = 1; n < m; ++n) {
    if (!(s.gamma[n] > 0.0)) throw StabilityError("toda flow: gamma lost positivity; reduce dt");
  }
  const std::vector<double> after = jacobi_spectrum(s);
  s.drift = 0.0;
  for (std::size_t i = 0; i < m; ++i) s.drift = std::max(s.drift, std::abs(after[i] - before[i]));
  if (!(s.drift <= kDriftLimit)) {
    throw StabilityError("toda flow: spectral drift " + std::to_string(s.drift) + " exceeds 1e-6; reduce dt");
  }
  s.times[k] += dt * steps;
  return s;
}

}  // namespace

TodaState gaussian_state(double eps, int n_max) {
  if (!(eps > 0.0) || n_max < 1) throw DomainError("gaussian_state: need eps > 0 and n_max >= 1");
  TodaState s;
  s.eps = eps;
  s.gamma.assign(n_max + 1, 0.0);
  s.beta.assign(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) s.gamma[n] = std::sqrt(n * eps);
  return s;
}

TodaState state_from_recurrence(const RecurrenceTable& t) {
  TodaState s;
  s.eps = 1.0 / t.N;
  s.gamma = t.gamma;
  s.gamma[0] = 0.0;
  s.beta = t.beta;
  check_state(s);
  return s;
}

TodaState state_from_profiles(const std::function<double(double)>& u, const std::function<double(double)>& v,
                              double eps, int n_max) {
  if (!(eps > 0.0) || n_max < 1) throw DomainError("state_from_profiles: need eps > 0 and n_max >= 1");
  TodaState s;
  s.eps = eps;
  s.gamma.assign(n_max + 1, 0.0);
  s.beta.assign(n_max + 1, 0.0);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) s.gamma[n] = std::exp(0.5 * u(eps * n));
    s.beta[n] = -v(eps * n);
  }
  return s;
}

std::vector<double> jacobi_spectrum(const TodaState& s) {
  const int m = static_cast<int>(s.beta.size());
  Eigen::VectorXd d(m), e(std::max(m - 1, 0));
  for (int n = 0; n < m; ++n) d[n] = s.beta[n];
  for (int n = 1; n < m; ++n) e[n - 1] = s.gamma[n];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + m);
}

TodaState flow_t1(const TodaState& s, double dt, int steps) {
  const double eps = s.eps;
  return integrate(s, 1, dt, steps,
                   [eps](const std::vector<double>& g, const std::vector<double>& b, std::vector<double>& dg,
                         std::vector<double>& db) {
                     const std::size_t m = b.size();
                     dg[0] = 0.0;
                     for (std::size_t n = 1; n < m; ++n) dg[n] = g[n] * (b[n - 1] - b[n]) / (2.0 * eps);
                     for (std::size_t n = 0; n < m; ++n) {
                       const double gn = n > 0 ? g[n] : 0.0;
                       const double gn1 = n + 1 < m ? g[n + 1] : 0.0;
                       db[n] = (gn * gn - gn1 * gn1) / eps;
                     }
                   });
}

TodaState flow_hierarchy(const TodaState& s, int k, double dt, int steps) {
  if (k < 1 || k > 4) throw DomainError("flow_hierarchy: k must lie in [1, 4]");
  const double eps = s.eps;
  return integrate(s, k, dt, steps,
                   [eps, k](const std::vector<double>& g, const std::vector<double>& b, std::vector<double>& dg,
                            std::vector<double>& db) {
                     const Eigen::MatrixXd Q = jacobi_matrix(g, b);
                     Eigen::MatrixXd P = Q;
                     for (int i = 1; i < k; ++i) P = P * Q;
                     const int m = static_cast<int>(b.size());
                     dg[0] = 0.0;
                     for (int n = 1; n < m; ++n) dg[n] = g[n] / 2.0 * (P(n - 1, n - 1) - P(n, n)) / eps;
                     for (int n = 0; n < m; ++n) {
                       const double lo = n > 0 ? g[n] * P(n, n - 1) : 0.0;
                       const double hi = n + 1 < m ? g[n + 1] * P(n + 1, n) : 0.0;
                       db[n] = (lo - hi) / eps;
                     }
                   });
}

StringResidual string_residual(const TodaState& s, const Polynomial& V) {
  check_state(s);
  const Polynomial dV = V.derivative();
  const Eigen::MatrixXd Q = jacobi_matrix(s.gamma, s.beta);
  const int m = static_cast<int>(s.beta.size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
  for (int i = dV.degree(); i >= 0; --i) {
    W = W * Q;
    W.diagonal().array() += dV.coeff(i);
  }
  // Rows n with n + deg V' <= n_max see no truncation.
  StringResidual r;
  const int last = s.n_max() - std::max(dV.degree(), 1);
  for (int n = 0; n <= last; ++n) {
    r.n.push_back(n);
    r.res1.push_back(n > 0 ? s.gamma[n] * W(n, n - 1) - n * s.eps : 0.0);
    r.res2.push_back(W(n, n));
    r.max_abs = std::max({r.max_abs, std::abs(r.res1.back()), std::abs(r.res2.back())});
  }
  return r;
}

HodographPotential::HodographPotential(const Polynomial& V0) {
  if (V0.degree() < 2) throw DomainError("HodographPotential: V0 must have degree >= 2");
  const Polynomial dV = V0.derivative();
  const int jmax = dV.degree() + 2;
  std::vector<double> binom(jmax + 1);  // binomial(1/2, i)
  binom[0] = 1.0;
  for (int i = 1; i <= jmax; ++i) binom[i] = binom[i - 1] * (0.5 - (i - 1)) / i;
  c_.assign(jmax + 1, std::vector<double>(jmax + 1, 0.0));
  // Coefficient of 1/xi in W'(xi) sqrt((xi - r+)(xi - r-)) with W(xi) = V0(-xi),
  // negated. r+- = -beta +- 2 gamma are the negated support endpoints, so the
  // residue runs over the reflected potential; the overall sign makes
  // V0 = xi^2/2 at t = 0 give r+- = +-2 sqrt(x).
  for (int m = 0; m <= dV.degree(); ++m) {
    const int j = m + 2;
    const double w = m % 2 == 0 ? -dV.coeff(m) : dV.coeff(m);  // W'(xi) = -V0'(-xi)
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    for (int i = 0; i <= j; ++i) c_[i][j - i] -= w * binom[i] * binom[j - i] * sign;
  }
}

double HodographPotential::derivative(double rp, double rm, int p, int q) const {
  const int n = static_cast<int>(c_.size());
  auto falling = [](int i, int k) {
    double f = 1.0;
    for (int a = 0; a < k; ++a) f *= i - a;
    return f;
  };
  double acc = 0.0;
  for (int i = p; i < n; ++i) {
    for (int j = q; j + i < n; ++j) {
      if (c_[i][j] == 0.0) continue;
      acc += c_[i][j] * falling(i, p) * falling(j, q) * std::pow(rp, i - p) * std::pow(rm, j - q);
    }
  }
  return acc;
}

namespace {

struct HodographSystem {
  const HodographPotential& f;
  double x;
  double t;

  Eigen::Vector2d residual(double rp, double rm) const {
    const double lam = (rp - rm) / 4.0;
    return {-lam * t + f.derivative(rp, rm, 1, 0) - x, lam * t + f.derivative(rp, rm, 0, 1) - x};
  }
  Eigen::Matrix2d jacobian(double rp, double rm) const {
    Eigen::Matrix2d J;
    const double fpm = f.derivative(rp, rm, 1, 1);
    J << -t / 4.0 + f.derivative(rp, rm, 2, 0), t / 4.0 + fpm, t / 4.0 + fpm, -t / 4.0 + f.derivative(rp, rm, 0, 2);
    return J;
  }
};

// Newton with backtracking; returns false when the iteration stalls.
bool hodograph_newton(const HodographSystem& sys, double& rp, double& rm) {
  const double tol = 1e-13 * std::max(1.0, std::abs(sys.x));
  Eigen::Vector2d F = sys.residual(rp, rm);
  for (int it = 0; it < 80; ++it) {
    if (F.lpNorm<Eigen::Infinity>() <= tol) return rp > rm;
    const Eigen::Matrix2d J = sys.jacobian(rp, rm);
    if (std::abs(J.determinant()) < 1e-300) return false;
    const Eigen::Vector2d d = J.partialPivLu().solve(-F);
    double step = 1.0;
    for (; step > 1e-6; step /= 2.0) {
      const Eigen::Vector2d Fn = sys.residual(rp + step * d[0], rm + step * d[1]);
      if (Fn.lpNorm<Eigen::Infinity>() < F.lpNorm<Eigen::Infinity>()) break;
    }
    if (step <= 1e-6) return false;
    rp += step * d[0];
    rm += step * d[1];
    F = sys.residual(rp, rm);
  }
  return F.lpNorm<Eigen::Infinity>() <= 100.0 * tol && rp > rm;
}

HodographPoint finish(const HodographSystem& sys, double rp, double rm) {
  const Eigen::Matrix2d J = sys.jacobian(rp, rm);
  // Newton reaches a cusp only to |r - r_c| ~ tol^(1/3), leaving J_{++} ~ tol^(2/3).
  const Eigen::Vector2d sv = J.jacobiSvd().singularValues();
  if (!(sv[1] > 1e-6 * sv[0])) {
    throw SingularJacobianError("hodograph_solve: Jacobian is singular; the catastrophe has been reached");
  }
  HodographPoint p;
  p.x = sys.x;
  p.t = sys.t;
  p.r_plus = rp;
  p.r_minus = rm;
  p.lambda_plus = -(rp - rm) / 4.0;
  p.lambda_minus = (rp - rm) / 4.0;
  p.residual = sys.residual(rp, rm).lpNorm<Eigen::Infinity>();
  return p;
}

// Best (centre, half-width) cells of a scan, by residual norm.
std::vector<std::pair<double, double>> scan_seeds(const std::function<double(double, double)>& norm, int keep) {
  std::vector<std::tuple<double, double, double>> cells;
  for (int i = 0; i <= 48; ++i) {
    const double c = -6.0 + 0.25 * i;
    for (int j = 0; j < 48; ++j) {
      const double rho = 0.02 * std::pow(1000.0, j / 47.0);
      const double v = norm(c + rho, c - rho);
      if (std::isfinite(v)) cells.emplace_back(v, c + rho, c - rho);
    }
  }
  std::sort(cells.begin(), cells.end());
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < keep && i < static_cast<int>(cells.size()); ++i) {
    out.emplace_back(std::get<1>(cells[i]), std::get<2>(cells[i]));
  }
  return out;
}

}  // namespace

HodographPoint hodograph_solve(double x, double t, const Polynomial& V0) {
  if (!(x > 0.0)) throw DomainError("hodograph_solve: x must be positive");
  const HodographPotential f(V0);
  const HodographSystem sys{f, x, t};
  const auto seeds =
      scan_seeds([&](double rp, double rm) { return sys.residual(rp, rm).lpNorm<Eigen::Infinity>(); }, 8);
  for (auto [rp, rm] : seeds) {
    if (hodograph_newton(sys, rp, rm)) return finish(sys, rp, rm);
  }
  throw ConvergenceError("hodograph_solve: no seed converged",
                         seeds.empty() ? std::vector<double>{} : std::vector<double>{seeds[0].first, seeds[0].second});
}

TodaState state_from_hodograph(const Polynomial& V0, double t, double eps, int n_max) {
  if (!(eps > 0.0) || n_max < 3) throw DomainError("state_from_hodograph: need eps > 0 and n_max >= 3");
  const HodographPotential f(V0);
  TodaState s;
  s.eps = eps;
  s.gamma.assign(n_max + 1, 0.0);
  s.beta.assign(n_max + 1, 0.0);
  s.times[1] = t;
  HodographPoint p = hodograph_solve(eps, t, V0);
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      // Continue from the previous node.
      const HodographSystem sys{f, eps * n, t};
      double rp = p.r_plus, rm = p.r_minus;
      p = hodograph_newton(sys, rp, rm) ? finish(sys, rp, rm) : hodograph_solve(eps * n, t, V0);
    }
    s.gamma[n] = (p.r_plus - p.r_minus) / 4.0;
    s.beta[n] = -(p.r_plus + p.r_minus) / 2.0;
  }
  // The continuum solution degenerates at x = 0; beta_0 is extrapolated.
  s.beta[0] = 2.0 * s.beta[1] - s.beta[2];
  return s;
}

double continuum_residual(const TodaState& s, double x_min) {
  check_state(s);
  const int m = s.n_max();
  if (m < 5) throw DomainError("continuum_residual: need n_max >= 5");
  const double h = s.eps;
  std::vector<double> v(m + 1), E(m + 1);
  for (int n = 1; n <= m; ++n) {
    v[n] = -s.beta[n];
    E[n] = s.gamma[n] * s.gamma[n];  // e^u
  }
  auto d1 = [h](const std::vector<double>& a, int n) {
    return (a[n - 2] - 8.0 * a[n - 1] + 8.0 * a[n + 1] - a[n + 2]) / (12.0 * h);
  };
  auto d2 = [h](const std::vector<double>& a, int n) {
    return (-a[n - 2] + 16.0 * a[n - 1] - 30.0 * a[n] + 16.0 * a[n + 1] - a[n + 2]) / (12.0 * h * h);
  };
  double worst = 0.0;
  for (int n = 3; n <= m - 2; ++n) {
    if (h * n < x_min) continue;
    const double ru = (v[n] - v[n - 1]) / h - (d1(v, n) - 0.5 * h * d2(v, n));
    const double rv = (E[n + 1] - E[n]) / h - (d1(E, n) + 0.5 * h * d2(E, n));
    worst = std::max({worst, std::abs(ru), std::abs(rv)});
  }
  return worst;
}

CriticalPoint locate_catastrophe(const Polynomial& V0) {
  const HodographPotential f(V0);
  // t = 4 f_{++} eliminated. The difference of the two hodograph equations,
  // -(r+ - r-) t/2 + f_+ - f_- = 0, equals -2 (r+ - r-)(f_{++} + f_{+-}) by the
  // Euler-Darboux relation; the factor r+ - r- is divided out.
  auto H = [&](double rp, double rm) {
    return Eigen::Vector2d(f.derivative(rp, rm, 3, 0), f.derivative(rp, rm, 2, 0) + f.derivative(rp, rm, 1, 1));
  };
  const auto seeds = scan_seeds(
      [&](double rp, double rm) { return H(rp, rm).lpNorm<1>() / (1.0 + std::abs(f.derivative(rp, rm, 2, 0))); }, 24);
  RootConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.max_iter = 80;
  for (auto [rp0, rm0] : seeds) {
    try {
      const auto r = newton_solve(
          [&](const Eigen::VectorXd& z) {
            const Eigen::Vector2d h = H(z[0], z[1]);
            return Eigen::VectorXd(h);
          },
          Eigen::Vector2d(rp0, rm0), cfg);
      const double rp = r.x[0], rm = r.x[1];
      if (!(rp - rm > 1e-6) || r.residual_norm > 1e-11) continue;
      CriticalPoint cp;
      cp.r_plus = rp;
      cp.r_minus = rm;
      cp.t = 4.0 * f.derivative(rp, rm, 2, 0);
      cp.x = -(rp - rm) / 4.0 * cp.t + f.derivative(rp, rm, 1, 0);
      if (!(cp.x > 0.0)) continue;  // the lattice variable x = n eps is positive
      return cp;
    } catch (const Error&) {
      continue;
    }
  }
  throw ConvergenceError("locate_catastrophe: no critical point found");
}

CatastropheConstants catastrophe_constants(const Polynomial& V0, const CriticalPoint& cp) {
  if (!(cp.r_plus > cp.r_minus)) throw DomainError("catastrophe_constants: need r+ > r-");
  const HodographPotential f(V0);
  const double rp = cp.r_plus, rm = cp.r_minus;
  const double fourth = f.derivative(rp, rm, 4, 0);  // lambda_+ is linear, so only f contributes
  const double minus = -cp.t / 4.0 + f.derivative(rp, rm, 0, 2);
  const double scale = std::max({1.0, std::abs(f.derivative(rp, rm, 2, 0)), std::abs(cp.t)});
  if (std::abs(fourth) < 1e-10 * scale || std::abs(minus) < 1e-10 * scale) {
    throw GenericityError("catastrophe_constants: the critical point is not generic");
  }
  CatastropheConstants c;
  c.c1 = minus;
  c.c2 = -0.25 / (-(rp - rm) / 2.0);
  c.c3 = fourth / 6.0;
  // (r+ - r-) / (192 (lambda_- - lambda_+)) with lambda_- - lambda_+ = (r+ - r-)/2.
  c.c4 = 1.0 / 96.0;
  return c;
}

}  // namespace critasym
