#include "critasym/hopf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "critasym/core/quadrature.hpp"
#include "critasym/core/roots.hpp"
#include "critasym/errors.hpp"

namespace critasym {

InitialData make_sech2_data() {
  InitialData d;
  d.name = "sech2";
  d.u0 = [](double x) {
    const double c = std::cosh(x);
    return -1.0 / (c * c);
  };
  d.u0_prime = [](double x) {
    const double c = std::cosh(x);
    return 2.0 * std::tanh(x) / (c * c);
  };
  d.u0_second = [](double x) {
    const double c = std::cosh(x);
    const double th = std::tanh(x);
    return 2.0 * (1.0 - 3.0 * th * th) / (c * c);
  };
  d.x_M = 0.0;
  d.f_L = [](double u) { return -std::acosh(1.0 / std::sqrt(-u)); };
  d.f_L1 = [](double u) { return 0.5 / (u * std::sqrt(1.0 + u)); };
  d.f_L2 = [](double u) {
    const double r = std::sqrt(1.0 + u);
    return 0.5 * (-1.0 / (u * u * r) - 0.5 / (u * r * r * r));
  };
  d.f_L3 = [](double u) {
    const double r = std::sqrt(1.0 + u);
    const double r3 = r * r * r;
    return 0.5 * (2.0 / (u * u * u * r) + 1.0 / (u * u * r3) + 0.75 / (u * r3 * r * r));
  };
  d.domain_halfwidth = 12.0;
  return d;
}

namespace {

// Natural cubic spline with value and first three derivatives.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      r[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    // Thomas algorithm; rows 0 and n-1 pin m = 0.
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    m_[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
  }

  // k-th derivative, k in 0..3.
  double operator()(double t, int k = 0) const {
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
    i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - t) / h;
    const double B = (t - x_[i]) / h;
    switch (k) {
      case 0:
        return A * y_[i] + B * y_[i + 1] + ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
      case 1:
        return (y_[i + 1] - y_[i]) / h - (3.0 * A * A - 1.0) / 6.0 * h * m_[i] + (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
      case 2:
        return A * m_[i] + B * m_[i + 1];
      default:
        return (m_[i + 1] - m_[i]) / h;
    }
  }

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace

InitialData make_tabulated_data(std::span<const double> x, std::span<const double> u0) {
  if (x.size() != u0.size() || x.size() < 8) {
    throw ValidationError("tabulated initial data: need >= 8 (x, u0) pairs of equal length");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ValidationError("tabulated initial data: x must be strictly increasing");
  }
  const auto it = std::min_element(u0.begin(), u0.end());
  const double umin = *it;
  if (std::abs(umin + 1.0) > 1e-6) {
    throw ValidationError("tabulated initial data: minimum must be -1 (got " + std::to_string(umin) + ")");
  }
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> us(u0.size());
  for (std::size_t i = 0; i < us.size(); ++i) {
    us[i] = u0[i] / -umin;
    if (!(us[i] < 0.0)) throw ValidationError("tabulated initial data: u0 must be negative");
  }
  auto spline = std::make_shared<const CubicSpline>(xs, us);

  // Minimum of the spline near the sampled minimum.
  const std::size_t imin = static_cast<std::size_t>(it - u0.begin());
  double x_M = xs[imin];
  if (imin > 0 && imin + 1 < xs.size()) {
    const double lo = xs[imin - 1];
    const double hi = xs[imin + 1];
    auto d1 = [spline](double t) { return (*spline)(t, 1); };
    if (d1(lo) < 0.0 && d1(hi) > 0.0) x_M = find_root_bracketed(d1, lo, hi);
  }
  const double scale = -(*spline)(x_M);
  for (std::size_t i = 1; i <= imin; ++i) {
    if (!(us[i] < us[i - 1])) throw ValidationError("tabulated initial data: u0 must decrease left of its minimum");
  }

  InitialData d;
  d.name = "tabulated";
  d.u0 = [spline, scale](double t) { return (*spline)(t) / scale; };
  d.u0_prime = [spline, scale](double t) { return (*spline)(t, 1) / scale; };
  d.u0_second = [spline, scale](double t) { return (*spline)(t, 2) / scale; };
  d.x_M = x_M;
  d.domain_halfwidth = std::max(std::abs(xs.front()), std::abs(xs.back()));
  const double x_left = xs.front();
  auto f_L = [spline, scale, x_left, x_M](double u) {
    auto g = [&](double t) { return (*spline)(t) / scale - u; };
    return find_root_bracketed(g, x_left, x_M);
  };
  d.f_L = f_L;
  d.f_L1 = [spline, scale, f_L](double u) { return scale / (*spline)(f_L(u), 1); };
  auto f_L2 = [spline, scale, f_L](double u) {
    const double x0 = f_L(u);
    const double p = (*spline)(x0, 1) / scale;
    return -((*spline)(x0, 2) / scale) / (p * p * p);
  };
  d.f_L2 = f_L2;
  d.f_L3 = [f_L2](double u) {
    const double h = 1e-4 * std::min(1.0, std::min(-u, 1.0 + u));
    return (f_L2(u + h) - f_L2(u - h)) / (2.0 * h);
  };
  return d;
}

InitialData load_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open initial data file " + path);
  std::vector<double> x, u;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (ss >> a >> b) {
      x.push_back(a);
      u.push_back(b);
    }
  }
  auto d = make_tabulated_data(x, u);
  d.name = "tabulated:" + path;
  return d;
}

InitialData scale_x(const InitialData& src, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("scale_x: lambda must be positive");
  InitialData d = src;
  d.name = src.name + "_scaled";
  d.u0 = [f = src.u0, lambda](double x) { return f(lambda * x); };
  d.u0_prime = [f = src.u0_prime, lambda](double x) { return lambda * f(lambda * x); };
  d.u0_second = [f = src.u0_second, lambda](double x) { return lambda * lambda * f(lambda * x); };
  d.x_M = src.x_M / lambda;
  d.f_L = [f = src.f_L, lambda](double u) { return f(u) / lambda; };
  d.f_L1 = [f = src.f_L1, lambda](double u) { return f(u) / lambda; };
  d.f_L2 = [f = src.f_L2, lambda](double u) { return f(u) / lambda; };
  d.f_L3 = [f = src.f_L3, lambda](double u) { return f(u) / lambda; };
  d.domain_halfwidth = src.domain_halfwidth / lambda;
  return d;
}

double hopf_characteristic(double x, double t, const InitialData& data) {
  if (!(t >= 0.0)) throw DomainError("hopf_solve: t must be >= 0");
  if (t == 0.0) return x;
  // u0 takes values in [-1, 0), so every root lies in [x, x + 6t].
  auto g = [&](double xi) { return x - 6.0 * t * data.u0(xi) - xi; };
  constexpr int kScan = 4096;
  const double lo = x;
  const double hi = x + 6.0 * t;
  std::vector<std::pair<double, double>> brackets;
  double prev_x = lo;
  double prev_g = g(lo);
  std::vector<double> exact_roots;
  if (prev_g == 0.0) exact_roots.push_back(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double xi = lo + (hi - lo) * i / kScan;
    const double gi = g(xi);
    if (gi == 0.0) {
      exact_roots.push_back(xi);
    } else if (prev_g != 0.0 && (gi > 0.0) != (prev_g > 0.0)) {
      brackets.emplace_back(prev_x, xi);
    }
    prev_x = xi;
    prev_g = gi;
  }
  std::vector<double> roots = exact_roots;
  RootConfig cfg;
  cfg.abs_tol = 1e-14;
  for (auto [a, b] : brackets) roots.push_back(find_root_bracketed(g, a, b, cfg));
  std::sort(roots.begin(), roots.end());
  if (roots.empty()) throw ConvergenceError("hopf_solve: no characteristic found");
  if (roots.size() > 1) {
    std::vector<double> branches;
    for (double r : roots) branches.push_back(data.u0(r));
    throw AmbiguityError("hopf_solve: (x,t) lies in the multivalued region (" + std::to_string(roots.size()) +
                             " characteristics)",
                         branches);
  }
  const double xi = roots.front();
  if (std::abs(g(xi)) > 1e-10) throw ConvergenceError("hopf_solve: characteristic residual above 1e-10", {xi});
  return xi;
}

double hopf_solve(double x, double t, const InitialData& data) {
  return data.u0(hopf_characteristic(x, t, data));
}

CatastrophePoint breaking_point(const InitialData& data) {
  const double W = data.domain_halfwidth;
  constexpr int kScan = 4096;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> grid(kScan + 1);
  for (int i = 0; i <= kScan; ++i) {
    grid[i] = -W + 2.0 * W * i / kScan;
    const double v = data.u0_prime(grid[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (!(best_val < 0.0)) throw GenericityError("breaking_point: u0' has no negative minimum");
  if (best == 0 || best == kScan) throw GenericityError("breaking_point: steepest descent at the domain edge");
  const double lo = grid[best - 1];
  const double hi = grid[best + 1];
  double xi_c = grid[best];
  const double s_lo = data.u0_second(lo);
  const double s_hi = data.u0_second(hi);
  if ((s_lo < 0.0) && (s_hi > 0.0)) {
    RootConfig cfg;
    cfg.abs_tol = 1e-15;
    xi_c = find_root_bracketed(data.u0_second, lo, hi, cfg);
  } else if (!(s_lo <= 0.0 && s_hi >= 0.0)) {
    throw GenericityError("breaking_point: u0'' does not change sign at the argmax");
  }
  // Non-degenerate maximum of -6 u0': its second derivative is -6 u0'''.
  const double h = 1e-4;
  const double curv = -6.0 * (data.u0_second(xi_c + h) - data.u0_second(xi_c - h)) / (2.0 * h);
  if (std::abs(curv) <= 1e-6) throw GenericityError("breaking_point: flat maximum of -6 u0'");

  CatastrophePoint cp;
  cp.xi_c = xi_c;
  cp.t_c = 1.0 / (-6.0 * data.u0_prime(xi_c));
  cp.u_c = data.u0(xi_c);
  cp.x_c = 6.0 * cp.t_c * cp.u_c + xi_c;
  cp.k = -data.f_L3(cp.u_c);
  return cp;
}

namespace {

void check_theta_args(double lambda, double u) {
  if (!(lambda > -1.0 && lambda < 0.0) || !(u > -1.0 && u < 0.0)) {
    throw DomainError("theta: arguments must lie in (-1, 0), got lambda=" + std::to_string(lambda) +
                      ", u=" + std::to_string(u));
  }
}

// theta^(j)(lambda; u) = 1/2 int_0^1 f_L^(j+1)(w) (1 - sigma)^j sigma^(-1/2) d sigma with
// w = lambda + sigma (u - lambda). In s = sqrt(1 + w) the generic square-root
// blow-up of f_L' at w = -1 is absorbed, and the sigma^(-1/2) endpoint becomes a
// Gauss-Jacobi weight at s_lambda.
std::array<double, 3> theta_sum(double lambda, double u, const InitialData& data, int n, int jmax) {
  const double sl = std::sqrt(1.0 + lambda);
  const double su = std::sqrt(1.0 + u);
  const bool up = lambda > u;  // singular endpoint is the upper one
  const double a = up ? su : sl;
  const double b = up ? sl : su;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const QuadratureRule& rule = up ? gauss_jacobi_rule(n, -0.5, 0.0) : gauss_jacobi_rule(n, 0.0, -0.5);
  const double d = std::abs(lambda - u);
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes[i];
    const double s = mid + half * x;
    const double w = s * s - 1.0;
    // s^2 - s_u^2 from the node offset, free of cancellation.
    const double off = up ? half * (1.0 + x) * (s + su) : -half * (1.0 - x) * (s + su);
    const double base = rule.weights[i] * s / std::sqrt(s + sl);
    acc[0] += base * data.f_L1(w);
    if (jmax >= 1) acc[1] += base * data.f_L2(w) * off;
    if (jmax >= 2) acc[2] += base * data.f_L3(w) * off * off;
  }
  // Jacobian of the affine map to [-1, 1] for the weight (b-y)^(-1/2) or (y-a)^(-1/2).
  const double jac = std::sqrt(half);
  const double rd = 1.0 / std::sqrt(d);
  acc[0] *= jac * rd;
  acc[1] *= jac * rd / (lambda - u);
  acc[2] *= jac * rd / (d * d);
  return acc;
}

std::array<double, 3> theta_converged(double lambda, double u, const InitialData& data, int jmax) {
  if (lambda == u) {
    // Limits of 1/2 int (1-sigma)^j sigma^(-1/2): 1, 2/3, 8/15.
    return {data.f_L1(u), jmax >= 1 ? 2.0 / 3.0 * data.f_L2(u) : 0.0, jmax >= 2 ? 8.0 / 15.0 * data.f_L3(u) : 0.0};
  }
  auto prev = theta_sum(lambda, u, data, 16, jmax);
  for (int n = 32; n <= 4096; n *= 2) {
    const auto cur = theta_sum(lambda, u, data, n, jmax);
    bool ok = true;
    for (int j = 0; j <= jmax; ++j) ok = ok && std::abs(cur[j] - prev[j]) <= 1e-11 * std::max(1.0, std::abs(cur[j]));
    if (ok) return cur;
    prev = cur;
  }
  throw AccuracyError("theta: quadrature did not converge");
}

}  // namespace

ThetaValue theta_derivs(double lambda, double u, const InitialData& data) {
  check_theta_args(lambda, u);
  const auto r = theta_converged(lambda, u, data, 2);
  return {r[0], r[1], r[2]};
}

double theta_of(double lambda, double u, const InitialData& data) {
  check_theta_args(lambda, u);
  return theta_converged(lambda, u, data, 0)[0];
}

}  // namespace critasym
