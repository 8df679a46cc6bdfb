#include "critasym/orthopoly.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "critasym/errors.hpp"

namespace critasym {

namespace {

using mp = boost::multiprecision::cpp_bin_float_50;
constexpr int kGaussOrder = 30;
// Initial cut where N (V - min V) exceeds this plus 2 n_max; widened until the
// p_n^2 w mass in the outer panels falls below kBoundaryMass.
constexpr double kTailExponent = 80.0;
constexpr double kBoundaryMass = 1e-32;
constexpr int kMaxWiden = 8;

mp eval_mp(const Polynomial& V, const mp& s) {
  mp v = 0;
  const auto& c = V.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

// Gauss-Legendre nodes on [-1, 1]; Boost stores the non-negative half.
void reference_rule(std::vector<mp>& x, std::vector<mp>& w) {
  using G = boost::math::quadrature::gauss<mp, kGaussOrder>;
  const auto& ax = G::abscissa();
  const auto& aw = G::weights();
  for (std::size_t i = 0; i < ax.size(); ++i) {
    x.push_back(ax[i]);
    w.push_back(aw[i]);
    if (ax[i] != 0) {
      x.push_back(-ax[i]);
      w.push_back(aw[i]);
    }
  }
}

void check_weight_potential(const Polynomial& V) {
  if (V.degree() < 2 || V.degree() % 2 != 0 || !(V.coeffs().back() > 0.0)) {
    throw DomainError("compute_recurrence: V must have even degree and a positive leading coefficient");
  }
}

RecurrenceTable stieltjes(const Polynomial& V, int N, int n_max, double vmin, double a, double b, int panels,
                          const std::vector<mp>& rx, const std::vector<mp>& rw);

}  // namespace

RecurrenceTable compute_recurrence(const Polynomial& V, int N, int n_max, const RecurrenceOptions& opt) {
  check_weight_potential(V);
  if (N < 1) throw DomainError("compute_recurrence: N must be positive");
  if (n_max < 0 || n_max > opt.n_cap || n_max > 2 * N) {
    throw DomainError("compute_recurrence: n_max must lie in [0, min(n_cap, 2N)]");
  }
  if (opt.panels < 0) throw DomainError("compute_recurrence: panels must be non-negative");

  double vmin = V(0.0);
  for (double s : real_roots(V.derivative())) vmin = std::min(vmin, V(s));
  std::vector<mp> rx, rw;
  reference_rule(rx, rw);
  const int panels = opt.panels > 0 ? opt.panels : 64 + 4 * n_max;

  // The cut must clear the decay of p_n^2 w, not only of w: widen the
  // sublevel set until the outermost panels carry negligible mass.
  double rise = (kTailExponent + 2.0 * n_max) / N;
  for (int attempt = 0; attempt < kMaxWiden; ++attempt, rise *= 2.0) {
    const auto ends = real_roots(V - Polynomial({vmin + rise}));
    if (ends.size() < 2) throw DomainError("compute_recurrence: cannot bracket the weight");
    RecurrenceTable tab = stieltjes(V, N, n_max, vmin, ends.front(), ends.back(), panels, rx, rw);
    if (tab.boundary_mass < kBoundaryMass) return tab;
  }
  throw PrecisionError("compute_recurrence: truncation interval did not capture the weight", n_max);
}

namespace {

RecurrenceTable stieltjes(const Polynomial& V, int N, int n_max, double vmin, double a, double b, int panels,
                          const std::vector<mp>& rx, const std::vector<mp>& rw) {
  RecurrenceTable tab;
  tab.N = N;
  tab.V = V;
  tab.digits = std::numeric_limits<mp>::digits10;
  tab.lo = a;
  tab.hi = b;

  const int order = static_cast<int>(rx.size());
  const int M = panels * order;
  tab.nodes = M;
  std::vector<mp> s(M), w(M);
  const mp lo = tab.lo, h = (mp(tab.hi) - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const mp mid = lo + h * (p + mp(0.5));
    for (int i = 0; i < order; ++i) {
      const int j = p * order + i;
      s[j] = mid + h / 2 * rx[i];
      // Shifted by min V so the weights stay O(1); kappa is corrected below.
      w[j] = h / 2 * rw[i] * exp(-N * (eval_mp(V, s[j]) - vmin));
    }
  }
  auto edge_mass = [&](const std::vector<mp>& p) {
    mp m = 0;
    for (int i = 0; i < order; ++i) m += w[i] * p[i] * p[i] + w[M - 1 - i] * p[M - 1 - i] * p[M - 1 - i];
    return static_cast<double>(m);
  };

  mp mu0 = 0;
  for (const mp& wi : w) mu0 += wi;
  tab.gamma.assign(n_max + 1, 0.0);
  tab.beta.assign(n_max + 1, 0.0);
  tab.log_kappa.assign(n_max + 1, 0.0);
  tab.log_kappa[0] = -0.5 * (static_cast<double>(log(mu0)) - N * vmin);

  std::vector<mp> p_prev(M, mp(0)), p_cur(M), q(M);
  const mp p0 = 1 / sqrt(mu0);
  std::fill(p_cur.begin(), p_cur.end(), p0);
  mp gamma_n = 0;
  for (int n = 0; n <= n_max; ++n) {
    tab.boundary_mass = std::max(tab.boundary_mass, edge_mass(p_cur));
    mp b = 0;
    for (int j = 0; j < M; ++j) b += w[j] * s[j] * p_cur[j] * p_cur[j];
    tab.beta[n] = static_cast<double>(b);
    if (n == n_max) break;
    mp g2 = 0;
    for (int j = 0; j < M; ++j) {
      q[j] = (s[j] - b) * p_cur[j] - gamma_n * p_prev[j];
      g2 += w[j] * q[j] * q[j];
    }
    // gamma^2 is a sum of positive terms; losing it means the nodes ran out.
    if (!(g2 > 0) || n + 1 >= M) throw PrecisionError("compute_recurrence: gamma^2 lost positivity", n + 1);
    gamma_n = sqrt(g2);
    tab.gamma[n + 1] = static_cast<double>(gamma_n);
    tab.log_kappa[n + 1] = tab.log_kappa[n] - static_cast<double>(log(gamma_n));
    for (int j = 0; j < M; ++j) {
      p_prev[j] = p_cur[j];
      p_cur[j] = q[j] / gamma_n;
    }
  }
  tab.kappa.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) tab.kappa[n] = std::exp(tab.log_kappa[n]);
  return tab;
}

}  // namespace

RecurrenceTable compute_recurrence(const QuarticField& f, int N, int n_max, const RecurrenceOptions& opt) {
  return compute_recurrence(potential(f), N, n_max, opt);
}

std::vector<double> orthonormal_values(const RecurrenceTable& t, int n, double s) {
  if (n < 0 || n >= static_cast<int>(t.gamma.size())) throw DomainError("orthonormal_values: n outside the table");
  std::vector<double> p(n + 1);
  p[0] = std::exp(t.log_kappa[0]);
  for (int k = 0; k < n; ++k) {
    const double prev = k > 0 ? p[k - 1] : 0.0;
    p[k + 1] = ((s - t.beta[k]) * p[k] - t.gamma[k] * prev) / t.gamma[k + 1];
  }
  return p;
}

PartitionValue partition_log(const RecurrenceTable& t, int n) {
  if (n < 0 || n > static_cast<int>(t.log_kappa.size())) throw DomainError("partition_log: n outside the table");
  double acc = std::lgamma(n + 1.0);
  for (int j = 0; j < n; ++j) acc -= 2.0 * t.log_kappa[j];
  return {n, acc};
}

RecurrenceLimit asym_onecut(double a, double b) {
  if (!(b > a)) throw DomainError("asym_onecut: need a < b");
  return {(b - a) / 4.0, (b + a) / 2.0};
}

InteriorCritical interior_critical_t9(double origin) {
  const double xs = x_star();
  const EquilibriumMeasure mu = measure_t9(xs);
  InteriorCritical c;
  c.x_star = xs;
  c.s_star = 4.0 / 3.0;
  c.a = mu.intervals.front().a;
  c.b = mu.intervals.front().b;
  c.C = mu.h.coeffs().back();
  c.origin = origin;
  // y = m + r sin(th) removes the square-root endpoint at b.
  const double m = 0.5 * (c.a + c.b), r = 0.5 * (c.b - c.a);
  c.omega = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double th) { return mu.density(m + r * std::sin(th)) * r * std::cos(th); }, std::asin(std::clamp((origin - m) / r, -1.0, 1.0)),
      std::numbers::pi / 2, 10, 1e-14);
  return c;
}

InteriorAsymptotics asym_interior(double x, int n, const InteriorCritical& k, const HMGrid& hm) {
  if (n < 1) throw DomainError("asym_interior: n must be positive");
  if (!(k.b > k.a) || !(k.s_star > k.a && k.s_star < k.b) || !(k.C > 0.0)) {
    throw DomainError("asym_interior: inconsistent critical data");
  }
  const double ratio = (k.b + k.a - 2.0 * k.origin) / (k.b - k.a);
  if (std::abs(ratio) > 1.0) throw DomainError("asym_interior: |(b+a)/(b-a)| exceeds 1 about the origin");
  InteriorAsymptotics r;
  const double d = std::sqrt((k.s_star - k.a) * (k.b - k.s_star));
  r.c = std::cbrt(std::numbers::pi * k.C * d / 4.0);
  r.theta = std::asin(ratio);
  r.s = std::pow(n, 2.0 / 3.0) * std::expm1(k.x_star - x) / (r.c * d);
  r.outside_scaling = r.s > std::pow(n, 1.0 / 6.0);
  r.q = eval_hm(hm, r.s).value;
  const double scale = std::pow(n, -1.0 / 3.0);
  const double phase = 2.0 * std::numbers::pi * n * k.omega;
  r.gamma = (k.b - k.a) / 4.0 - r.q * std::cos(phase) / (2.0 * r.c) * scale;
  r.beta = (k.b + k.a) / 2.0 + r.q * std::sin(phase + r.theta) / r.c * scale;
  return r;
}

EdgeConstants edge_constants() {
  return {std::pow(6.0, 2.0 / 7.0), std::pow(6.0, -1.0 / 7.0), 2.0 * std::pow(6.0, -3.0 / 7.0)};
}

EdgeAsymptotics asym_edge(double x, double t, int n, PI2Cache& cache) {
  if (n < 1) throw DomainError("asym_edge: n must be positive");
  const EdgeConstants k = edge_constants();
  EdgeAsymptotics r;
  r.X = k.c1 * std::pow(n, 6.0 / 7.0) * std::expm1(x);
  r.T = k.c2 * std::pow(n, 4.0 / 7.0) * std::exp(x) * (t - 1.0);
  if (!std::isfinite(r.X) || !std::isfinite(r.T) || std::abs(r.X) > cache.L()) {
    throw DomainError("asym_edge: X = " + std::to_string(r.X) + " lies outside the solved P_I^2 domain; increase L");
  }
  const auto sol = cache.get(r.T);
  r.U = eval_pi2(*sol, r.X).value;
  // Both coefficients read the same correction.
  const double corr = r.U / k.c * std::pow(n, -2.0 / 7.0);
  r.beta = corr;
  r.gamma = 1.0 + corr / 2.0;
  return r;
}

ExteriorAsymptotics conjectured_exterior(double y, double n, const ExteriorParams& p) {
  if (!(n > 1.0)) throw DomainError("conjectured_exterior: n must exceed 1");
  if (!(p.b > p.a) || !(p.c0 > 0.0)) throw DomainError("conjectured_exterior: need a < b and c0 > 0");
  if (!p.c2 || !p.c3) throw DomainError("conjectured_exterior: c2 and c3 must be supplied");
  ExteriorAsymptotics r;
  r.sum = sech2_series(
      std::log(n), [&](int k) { return p.c2(y, k); }, p.c3, &r.terms);
  const RecurrenceLimit lim = asym_onecut(p.a, p.b);
  r.gamma = lim.gamma + p.c1 * r.sum;
  r.beta = lim.beta + p.c1 * r.sum;
  return r;
}

std::string to_string(AsymKind k) {
  switch (k) {
    case AsymKind::regular: return "regular";
    case AsymKind::interior: return "interior";
    case AsymKind::edge: return "edge";
  }
  return "unknown";
}

double loglog_slope(const std::vector<int>& n, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < n.size() && i < e.size(); ++i) {
    if (!(std::abs(e[i]) > 0.0) || n[i] < 1) continue;
    const double lx = std::log(static_cast<double>(n[i])), ly = std::log(std::abs(e[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::nan("");
  const double den = m * sxx - sx * sx;
  return den == 0.0 ? std::nan("") : (m * sxy - sx * sy) / den;
}

AsymComparison compare_asymptotics(const QuarticField& f, int N, int n_lo, int n_hi, AsymKind kind) {
  if (n_lo < 1 || n_hi < n_lo) throw DomainError("compare_asymptotics: need 1 <= n_lo <= n_hi");
  AsymComparison out;
  out.kind = kind;

  std::function<void(int, AsymRow&)> formula;
  InteriorCritical crit;
  HMGrid hm;
  PI2Cache cache;
  switch (kind) {
    case AsymKind::regular: {
      Interval iv;
      if (f.t == 0.0) {
        const double r = 2.0 * std::exp(-f.x / 2.0);
        iv = {-r, r};
      } else {
        iv = solve_onecut_endpoints(f);
      }
      out.a = iv.a;
      out.b = iv.b;
      formula = [&](int, AsymRow& row) {
        const RecurrenceLimit lim = asym_onecut(out.a, out.b);
        row.gamma_asym = lim.gamma;
        row.beta_asym = lim.beta;
      };
      break;
    }
    case AsymKind::interior: {
      if (f.t != 9.0) throw DomainError("compare_asymptotics: interior data is tabulated for t = 9 only");
      crit = interior_critical_t9();
      hm = solve_hastings_mcleod();
      out.a = crit.a;
      out.b = crit.b;
      formula = [&](int n, AsymRow& row) {
        const auto r = asym_interior(f.x, n, crit, hm);
        row.gamma_asym = r.gamma;
        row.beta_asym = r.beta;
      };
      break;
    }
    case AsymKind::edge: {
      out.a = -2.0;
      out.b = 2.0;
      formula = [&](int n, AsymRow& row) {
        const auto r = asym_edge(f.x, f.t, n, cache);
        row.gamma_asym = r.gamma;
        row.beta_asym = r.beta;
      };
      break;
    }
  }

  RecurrenceTable fixed;
  if (N > 0) fixed = compute_recurrence(f, N, n_hi);
  std::vector<int> ns;
  std::vector<double> errs, devs;
  for (int n = n_lo; n <= n_hi; ++n) {
    const RecurrenceTable tab = N > 0 ? RecurrenceTable{} : compute_recurrence(f, n, n);
    const RecurrenceTable& t = N > 0 ? fixed : tab;
    AsymRow row;
    row.n = n;
    row.gamma = t.gamma[n];
    row.beta = t.beta[n];
    formula(n, row);
    row.err_gamma = std::abs(row.gamma - row.gamma_asym);
    row.err_beta = std::abs(row.beta - row.beta_asym);
    row.deviation = std::abs(row.gamma - (out.b - out.a) / 4.0);
    out.rows.push_back(row);
    ns.push_back(n);
    errs.push_back(row.err_gamma);
    devs.push_back(row.deviation);
  }
  out.exponent = loglog_slope(ns, errs);
  out.deviation_exponent = loglog_slope(ns, devs);
  return out;
}

}  // namespace critasym
