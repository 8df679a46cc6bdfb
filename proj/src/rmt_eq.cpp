#include "critasym/rmt_eq.hpp"

#include <algorithm>
#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "critasym/core/roots.hpp"
#include "critasym/errors.hpp"

namespace critasym {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSingularTol = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Moments (1/pi) int_0^pi (c + r cos phi)^j dphi of the arcsine law on [c-r, c+r].
std::vector<double> arcsine_moments(double c, double r, int jmax) {
  std::vector<double> m(jmax + 1, 0.0);
  for (int j = 0; j <= jmax; ++j) {
    double binom_ji = 1.0;  // C(j, i)
    double acc = 0.0;
    for (int i = 0; i <= j; ++i) {
      if (i > 0) binom_ji = binom_ji * (j - i + 1) / i;
      if (i % 2 == 0) {
        double central = 1.0;  // C(i, i/2) / 2^i
        for (int q = 1; q <= i / 2; ++q) central *= double(i / 2 + q) / q / 4.0;
        acc += binom_ji * std::pow(c, j - i) * std::pow(r, i) * central;
      }
    }
    m[j] = acc;
  }
  return m;
}

// h with density sqrt((b-s)(s-a)) h(s) for the one-cut measure of V on [a,b].
Polynomial density_factor(const Polynomial& V, double a, double b) {
  const Polynomial dV = V.derivative();
  const int d = dV.degree();
  const auto m = arcsine_moments(0.5 * (a + b), 0.5 * (b - a), std::max(d, 0));
  std::vector<double> h(std::max(d, 1), 0.0);
  for (int k = 1; k <= d; ++k) {
    for (int i = 0; i < k; ++i) h[i] += dV.coeff(k) * m[k - 1 - i];
  }
  for (double& c : h) c /= 2.0 * kPi;
  return Polynomial(h);
}

double lhs(const EquilibriumMeasure& mu, const Polynomial& V, double s) { return 2.0 * mu.log_potential(s) - V(s); }

EquilibriumMeasure make_measure(double a, double b, Polynomial h, const Polynomial& V) {
  EquilibriumMeasure mu;
  mu.intervals = {{a, b}};
  mu.h = std::move(h);
  mu.ell = lhs(mu, V, 0.5 * (a + b));
  return mu;
}

// Strict interior local minima of f on an ascending sample grid, refined by Brent.
std::vector<std::pair<double, double>> local_minima(const std::function<double(double)>& f,
                                                    const std::vector<double>& xs) {
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (ys[i] < ys[i - 1] && ys[i] <= ys[i + 1]) {
      const auto r = boost::math::tools::brent_find_minima(f, xs[i - 1], xs[i + 1], 52);
      out.push_back({r.first, r.second});
    }
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

void check_potential(const Polynomial& V) {
  if (V.degree() < 2 || V.degree() % 2 != 0 || !(V.coeffs().back() > 0.0)) {
    throw DomainError("one-cut solver needs an even-degree V with positive leading coefficient");
  }
}

// Interval where V is within `rise` of its global minimum; covers every well.
Interval sublevel_range(const Polynomial& V, double rise) {
  double vmin = kInf;
  for (double s : real_roots(V.derivative())) vmin = std::min(vmin, V(s));
  const auto ends = real_roots(V - Polynomial({vmin + rise}));
  if (ends.size() < 2) throw DomainError("one-cut solver: V does not grow at infinity");
  return {ends.front(), ends.back()};
}

struct Candidate {
  Interval support;
  double cond_residual = 0.0;
};

// Newton roots of the endpoint conditions seeded from the best cells of a scan
// over (centre, half-width).
std::vector<Candidate> endpoint_candidates(const Polynomial& V) {
  check_potential(V);
  const Interval range = sublevel_range(V, 20.0);
  const int nc = 121, nr = 120;
  const double rmax = 0.5 * (range.b - range.a) + 1.0;
  struct Cell {
    double cost, c, r;
  };
  std::vector<Cell> cells;
  cells.reserve(nc * nr);
  for (int i = 0; i < nc; ++i) {
    const double c = range.a + (range.b - range.a) * i / (nc - 1);
    for (int j = 1; j <= nr; ++j) {
      const double r = rmax * j / nr;
      const auto [f1, f2] = onecut_conditions(V, c - r, c + r);
      cells.push_back({std::abs(f1) + std::abs(f2), c, r});
    }
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& p, const Cell& q) { return p.cost < q.cost; });

  std::vector<Candidate> roots;
  RootConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.max_iter = 60;
  VectorFn F = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const double r = std::exp(z[1]);
    const auto [f1, f2] = onecut_conditions(V, z[0] - r, z[0] + r);
    return Eigen::Vector2d(f1, f2);
  };
  const std::size_t tries = std::min<std::size_t>(cells.size(), 12);
  for (std::size_t k = 0; k < tries; ++k) {
    try {
      const auto res = newton_solve(F, Eigen::Vector2d(cells[k].c, std::log(cells[k].r)), cfg);
      const double r = std::exp(res.x[1]);
      const Interval s{res.x[0] - r, res.x[0] + r};
      const bool seen = std::any_of(roots.begin(), roots.end(), [&](const Candidate& q) {
        return std::abs(q.support.a - s.a) + std::abs(q.support.b - s.b) < 1e-8;
      });
      if (!seen) roots.push_back({s, res.residual_norm});
    } catch (const Error&) {
    }
  }
  if (roots.empty()) throw NotOneCutError("one-cut endpoint conditions have no root near the scan minima");
  return roots;
}

double signed_margin(const SingularityReport& r) { return std::min({r.margin_I, r.margin_II, r.margin_III}); }

// Prefers admissible roots (all margins above -tol), then the least violating one.
std::pair<Interval, SingularityReport> best_candidate(const Polynomial& V) {
  const auto roots = endpoint_candidates(V);
  std::pair<Interval, SingularityReport> best;
  double best_margin = -kInf;
  for (const auto& c : roots) {
    const auto mu = onecut_measure(V, c.support);
    const auto rep = classify(mu, V);
    const double m = signed_margin(rep);
    if (m > best_margin) best_margin = m, best = {c.support, rep};
  }
  return best;
}

}  // namespace

FieldValue field_eval(const QuarticField& f, double s) {
  const Polynomial V = potential(f);
  const Polynomial d1 = V.derivative();
  return {V(s), d1(s), d1.derivative()(s)};
}

Polynomial potential(const QuarticField& f) {
  const double e = std::exp(f.x), t = f.t;
  return Polynomial({0.0, e * t * 8.0 / 5.0, e * ((1.0 - t) / 2.0 + t / 5.0), -e * 4.0 * t / 15.0, e * t / 20.0});
}

double x_star() { return -std::log(245.0 / 9.0); }

double EquilibriumMeasure::density(double s) const {
  for (const auto& iv : intervals) {
    if (s >= iv.a && s <= iv.b) return std::sqrt((iv.b - s) * (s - iv.a)) * h(s);
  }
  return 0.0;
}

namespace {

// Cosine coefficients A_n = int_0^pi w(phi) cos(n phi) dphi of
// w = r^2 sin^2(phi) h(c + r cos phi), n = 0..deg h + 2, by the periodic
// trapezoid rule (exact for this trigonometric polynomial).
std::vector<double> cosine_coefficients(const Polynomial& h, double c, double r) {
  const int nmax = std::max(h.degree(), 0) + 2;
  const int npts = 4 * nmax + 16;
  std::vector<double> A(nmax + 1, 0.0);
  for (int q = 0; q < npts; ++q) {
    const double phi = 2.0 * kPi * q / npts;
    const double sn = std::sin(phi);
    const double w = r * r * sn * sn * h(c + r * std::cos(phi));
    for (int n = 0; n <= nmax; ++n) A[n] += w * std::cos(n * phi);
  }
  for (double& a : A) a *= kPi / npts;  // half of the full-period integral
  return A;
}

}  // namespace

double EquilibriumMeasure::mass() const {
  double m = 0.0;
  for (const auto& iv : intervals) m += cosine_coefficients(h, 0.5 * (iv.a + iv.b), 0.5 * (iv.b - iv.a))[0];
  return m;
}

double EquilibriumMeasure::log_potential(double s) const {
  // log|cos th - cos phi| = -log 2 - 2 sum cos(n th) cos(n phi) / n inside,
  // log|sigma - cos phi| = log(rho/2) - 2 sum rho^-n cos(n phi) / n outside.
  double total = 0.0;
  for (const auto& iv : intervals) {
    const double c = 0.5 * (iv.a + iv.b), r = 0.5 * (iv.b - iv.a);
    const auto A = cosine_coefficients(h, c, r);
    const double sigma = (s - c) / r;
    double acc;
    if (std::abs(sigma) <= 1.0) {
      const double th = std::acos(std::clamp(sigma, -1.0, 1.0));
      acc = std::log(r / 2.0) * A[0];
      for (std::size_t n = 1; n < A.size(); ++n) acc -= 2.0 * A[n] * std::cos(n * th) / n;
    } else {
      const double as = std::abs(sigma);
      const double rho = as + std::sqrt((as - 1.0) * (as + 1.0));
      acc = std::log(r * rho / 2.0) * A[0];
      const double sgn = sigma < 0 ? -1.0 : 1.0;
      double p = 1.0;
      for (std::size_t n = 1; n < A.size(); ++n) {
        p *= sgn / rho;
        acc -= 2.0 * A[n] * p / n;
      }
    }
    total += acc;
  }
  return total;
}

EquilibriumMeasure measure_gaussian(double x) {
  const double e = std::exp(x);
  const double R = 2.0 * std::exp(-x / 2.0);
  return make_measure(-R, R, Polynomial({e / (2.0 * kPi)}), potential({x, 0.0}));
}

EquilibriumMeasure measure_line_t(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("measure_line_t: need 0 < t <= 1");
  const double g2 = 5.0 / t - 5.0;
  const double k = 1.0 / (2.0 * kPi * (5.0 + g2));
  return make_measure(-2.0, 2.0, Polynomial({k * (4.0 + g2), -4.0 * k, k}), potential({0.0, t}));
}

double t9_b(double x) {
  const double e = std::exp(x);
  return std::sqrt(140.0 / 27.0 + 4.0 / 27.0 * std::sqrt(5.0) / e * std::sqrt(27.0 * e + 245.0 * e * e));
}

double t9_C(double x) {
  const double b = t9_b(x), e = std::exp(x);
  return (80.0 - 9.0 * b * b * b * b * e) / (36.0 * b * b * e);
}

EquilibriumMeasure measure_t9(double x) {
  if (x > x_star() + 1e-12) throw DomainError("measure_t9: x > x* is outside the one-cut regime");
  const double b = t9_b(x), C = x >= x_star() ? 0.0 : t9_C(x);
  const double k = 8.0 / (kPi * b * b * (b * b + 4.0 * C));
  const double s0 = 4.0 / 3.0;
  return make_measure(s0 - b, s0 + b, Polynomial({k * (s0 * s0 + C), -2.0 * k * s0, k}), potential({x, 9.0}));
}

std::vector<double> default_probe_grid(const EquilibriumMeasure& mu, int n) {
  const Interval iv = mu.intervals.front();
  const double ext = std::max(3.0, iv.b - iv.a);
  std::vector<double> g;
  for (int i = 0; i < n; ++i) {
    const double th = kPi * (i + 0.5) / n;  // Chebyshev points avoid the endpoints
    g.push_back(0.5 * (iv.a + iv.b) - 0.5 * (iv.b - iv.a) * std::cos(th));
  }
  for (int i = 1; i <= n; ++i) {
    g.push_back(iv.a - ext * i / n);
    g.push_back(iv.b + ext * i / n);
  }
  std::sort(g.begin(), g.end());
  return g;
}

VariationalResidual variational_residual(const EquilibriumMeasure& mu, const QuarticField& f,
                                         const std::vector<double>& probe_grid) {
  const Polynomial V = potential(f);
  double lo = kInf, hi = -kInf;
  std::vector<double> outside;
  for (double s : probe_grid) {
    const bool inside = std::any_of(mu.intervals.begin(), mu.intervals.end(),
                                    [s](const Interval& iv) { return s >= iv.a && s <= iv.b; });
    const double g = lhs(mu, V, s);
    if (!std::isfinite(g)) throw AccuracyError("variational_residual: non-finite log potential");
    if (inside) {
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    } else {
      outside.push_back(g);
    }
  }
  if (!(hi >= lo)) throw DomainError("variational_residual: probe grid misses the support");
  VariationalResidual r;
  r.eq_residual = 0.5 * (hi - lo);
  r.ell = 0.5 * (hi + lo);
  r.ineq_margin = kInf;
  for (double g : outside) r.ineq_margin = std::min(r.ineq_margin, r.ell - g);
  return r;
}

std::pair<double, double> onecut_conditions(const Polynomial& V, double a, double b) {
  const Polynomial dV = V.derivative();
  const int d = dV.degree();
  const auto m = arcsine_moments(0.5 * (a + b), 0.5 * (b - a), d + 1);
  double f1 = 0.0, f2 = -2.0;
  for (int k = 0; k <= d; ++k) {
    f1 += dV.coeff(k) * m[k];
    f2 += dV.coeff(k) * m[k + 1];
  }
  return {f1, f2};
}

EquilibriumMeasure onecut_measure(const Polynomial& V, const Interval& support) {
  if (!(support.b > support.a)) throw DomainError("onecut_measure: need a < b");
  return make_measure(support.a, support.b, density_factor(V, support.a, support.b), V);
}

Interval solve_onecut_endpoints(const Polynomial& V) {
  const auto [support, rep] = best_candidate(V);
  if (rep.margin_II < -kSingularTol || rep.margin_III < -kSingularTol) {
    throw NotOneCutError("one-cut candidate has a negative density");
  }
  const auto mu = onecut_measure(V, support);
  if (std::abs(mu.mass() - 1.0) > 1e-8) throw NotOneCutError("one-cut candidate does not have unit mass");
  return support;
}

Interval solve_onecut_endpoints(const QuarticField& f) { return solve_onecut_endpoints(potential(f)); }

std::string to_string(SingularityKind k) {
  switch (k) {
    case SingularityKind::exterior_I:
      return "exterior_I";
    case SingularityKind::interior_II:
      return "interior_II";
    case SingularityKind::edge_III:
      return "edge_III";
    default:
      return "none";
  }
}

SingularityReport classify(const EquilibriumMeasure& mu, const Polynomial& V) {
  if (mu.intervals.size() != 1) throw DomainError("classify: only one-cut measures are supported");
  const Interval iv = mu.intervals.front();
  const auto inner = linspace(iv.a, iv.b, 2001);
  double scale = 0.0;
  for (double s : inner) scale = std::max(scale, std::abs(mu.h(s)));
  if (!(scale > 0.0)) throw DomainError("classify: density factor vanishes identically");

  SingularityReport r;
  auto hn = [&](double s) { return mu.h(s) / scale; };
  const double ha = hn(iv.a), hb = hn(iv.b);
  r.margin_III = std::min(ha, hb);
  const double loc_III = ha <= hb ? iv.a : iv.b;

  r.margin_II = kInf;
  double loc_II = 0.0;
  for (const auto& [s, v] : local_minima(hn, inner)) {
    if (v < r.margin_II) r.margin_II = v, loc_II = s;
  }

  // Exterior scan reaches every other well of V.
  const Interval wells = sublevel_range(V, 20.0);
  const double ext = std::max(3.0, iv.b - iv.a);
  const double lo = std::min(iv.a - ext, wells.a - 1.0), hi = std::max(iv.b + ext, wells.b + 1.0);
  auto gap = [&](double s) { return mu.ell - lhs(mu, V, s); };
  r.margin_I = kInf;
  double loc_I = 0.0;
  for (const auto& side : {linspace(lo, iv.a, 2401), linspace(iv.b, hi, 2401)}) {
    std::vector<double> pts(side.begin(), side.end());
    for (const auto& [s, v] : local_minima(gap, pts)) {
      if (s > iv.a && s < iv.b) continue;
      if (v < r.margin_I) r.margin_I = v, loc_I = s;
    }
  }

  struct Option {
    SingularityKind kind;
    double margin;
    double loc;
  };
  const Option opts[] = {{SingularityKind::exterior_I, r.margin_I, loc_I},
                         {SingularityKind::interior_II, r.margin_II, loc_II},
                         {SingularityKind::edge_III, r.margin_III, loc_III}};
  int triggered = 0;
  const Option* pick = nullptr;
  for (const auto& o : opts) {
    if (o.margin < kSingularTol) {
      ++triggered;
      if (!pick || o.margin < pick->margin) pick = &o;
    }
  }
  r.margin = std::min({r.margin_I, r.margin_II, r.margin_III});
  r.ambiguous = triggered > 1;
  if (pick) {
    r.kind = pick->kind;
    r.location = pick->loc;
  }
  return r;
}

SingularityReport classify(const EquilibriumMeasure& mu, const QuarticField& f) {
  return classify(mu, potential(f));
}

PhaseCell rmt_phase_cell(double x, double t) {
  PhaseCell cell;
  cell.x = x;
  cell.t = t;
  try {
    const auto [support, rep] = best_candidate(potential({x, t}));
    cell.a = support.a;
    cell.b = support.b;
    cell.margin = signed_margin(rep);
    if (cell.margin < -kSingularTol) {
      cell.cls = "not_one_cut";
    } else if (rep.kind != SingularityKind::none) {
      cell.cls = to_string(rep.kind);
    } else {
      cell.cls = "one_cut";
    }
  } catch (const Error& e) {
    cell.cls = "failure";
    cell.margin = std::numeric_limits<double>::quiet_NaN();
    cell.message = e.what();
  }
  return cell;
}

RmtPhaseDiagram rmt_phase_diagram(const std::vector<double>& x_grid, const std::vector<double>& t_grid) {
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) throw DomainError("rmt_phase_diagram: x grid must be strictly increasing");
  }
  RmtPhaseDiagram pd;
  for (double t : t_grid) {
    const std::size_t row = pd.cells.size();
    for (double x : x_grid) pd.cells.push_back(rmt_phase_cell(x, t));
    for (std::size_t i = 0; i + 1 < x_grid.size(); ++i) {
      const PhaseCell& l = pd.cells[row + i];
      const PhaseCell& r = pd.cells[row + i + 1];
      if (!(std::isfinite(l.margin) && std::isfinite(r.margin))) continue;
      if ((l.margin < 0) == (r.margin < 0)) continue;
      double lo = l.x, hi = r.x;
      const bool left_negative = l.margin < 0;
      std::string kind;
      for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto [support, rep] = best_candidate(potential({mid, t}));
        const double m = signed_margin(rep);
        if ((m < 0) == left_negative) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (m < 0) kind = rep.margin_I <= rep.margin_II ? "exterior_I" : "interior_II";
      }
      if (kind.empty()) {
        const auto& neg = left_negative ? l : r;
        const auto [support, rep] = best_candidate(potential({neg.x, t}));
        kind = rep.margin_I <= rep.margin_II ? "exterior_I" : "interior_II";
      }
      pd.curves.push_back({t, 0.5 * (lo + hi), kind});
    }
  }
  return pd;
}

}  // namespace critasym
