#include "critasym/kdv_asym.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "critasym/core/quadrature.hpp"
#include "critasym/core/roots.hpp"
#include "critasym/core/sech_series.hpp"
#include "critasym/core/special.hpp"
#include "critasym/errors.hpp"

namespace critasym {

namespace {

// Closest approach to the minimum u0 = -1 accepted on an edge branch.
constexpr double kMinGap = 1e-6;

bool in_branch(double w) { return w > -1.0 && w < 0.0; }

// The two equations in (u, v) that fix an edge; the third only defines x.
Eigen::Vector2d edge_equations(EdgeKind kind, double t, double u, double v, const InitialData& data) {
  if (kind == EdgeKind::leading) {
    const ThetaValue tv = theta_derivs(v, u, data);
    return {6.0 * t + tv.value, tv.d_lambda};
  }
  const double half = 0.5 * (v - u);
  return {6.0 * t + theta_of(v, u, data), trailing_moment(t, u, v, data) / (half * std::sqrt(half))};
}

struct EdgeState {
  double u = 0.0;
  double v = 0.0;
};

bool ordered(EdgeKind kind, const EdgeState& s) { return kind == EdgeKind::leading ? s.u > s.v : s.u < s.v; }

// Local expansion about the catastrophe point: u - u_c ~ sqrt(dt).
EdgeState edge_seed(EdgeKind kind, double dt, const CatastrophePoint& cp) {
  if (kind == EdgeKind::leading) {
    const double a = std::sqrt(72.0 * dt / cp.k);
    return {cp.u_c + a, cp.u_c + a - 1.25 * a};
  }
  const double a = -std::sqrt(40.0 * dt / cp.k);
  return {cp.u_c + a, cp.u_c + a - 1.75 * a};
}

// Newton runs in r = sqrt(1 + w), so finite-difference probes stay inside the
// branch when u or v approach the minimum -1.
bool newton_edge(EdgeKind kind, double t, const EdgeState& guess, const InitialData& data, EdgeState& out) {
  if (!in_branch(guess.u) || !in_branch(guess.v)) return false;
  if (std::min(guess.u, guess.v) < -1.0 + kMinGap) return false;
  VectorFn F = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    if (!(std::min(z[0], z[1]) * std::min(z[0], z[1]) >= kMinGap)) return Eigen::Vector2d(1e10, 1e10);
    const EdgeState s{z[0] * z[0] - 1.0, z[1] * z[1] - 1.0};
    if (!in_branch(s.u) || !in_branch(s.v) || !ordered(kind, s)) return Eigen::Vector2d(1e10, 1e10);
    try {
      return edge_equations(kind, t, s.u, s.v, data);
    } catch (const Error&) {
      return Eigen::Vector2d(1e10, 1e10);
    }
  };
  RootConfig cfg;
  cfg.abs_tol = 1e-11;
  cfg.max_iter = 40;
  try {
    const NewtonResult r = newton_solve(F, Eigen::Vector2d(std::sqrt(1.0 + guess.u), std::sqrt(1.0 + guess.v)), cfg);
    if (!(r.x[0] > 0.0) || !(r.x[1] > 0.0)) return false;
    out = {r.x[0] * r.x[0] - 1.0, r.x[1] * r.x[1] - 1.0};
  } catch (const Error&) {
    return false;
  }
  if (!in_branch(out.u) || !in_branch(out.v) || !ordered(kind, out)) return false;
  if (std::min(out.u, out.v) < -1.0 + kMinGap) return false;
  return F(Eigen::Vector2d(std::sqrt(1.0 + out.u), std::sqrt(1.0 + out.v))).lpNorm<Eigen::Infinity>() < 1e-9;
}

EdgeSolution finish(EdgeKind kind, double t, const EdgeState& s, const InitialData& data) {
  EdgeSolution e;
  e.kind = kind;
  e.t = t;
  e.u = s.u;
  e.v = s.v;
  e.x_edge = 6.0 * t * s.u + data.f_L(s.u);
  const EdgeResiduals r = edge_residuals(kind, t, e.x_edge, e.u, e.v, data);
  e.residual = std::max({std::abs(r.r1), std::abs(r.r2), std::abs(r.r3)});
  return e;
}

const char* kind_name(EdgeKind kind) { return kind == EdgeKind::leading ? "leading" : "trailing"; }

}  // namespace

double trailing_moment(double t, double u, double v, const InitialData& data) {
  if (!(u < v)) throw DomainError("trailing_moment: need u < v");
  // lambda = r^2 - 1 keeps the integrand smooth as u approaches -1; the
  // sqrt(lambda - u) factor becomes sqrt(r - r_u) sqrt(r + r_u).
  const double ru = std::sqrt(1.0 + u);
  const double rv = std::sqrt(1.0 + v);
  auto f = [&](double r) {
    const double lam = r * r - 1.0;
    const double th = r == ru ? data.f_L1(u) : theta_of(lam, u, data);
    return (6.0 * t + th) * 2.0 * r * std::sqrt(r + ru);
  };
  return integrate_jacobi(f, ru, rv, 0.0, 0.5, 1e-10);
}

EdgeResiduals edge_residuals(EdgeKind kind, double t, double x, double u, double v, const InitialData& data) {
  EdgeResiduals r;
  r.r1 = x - 6.0 * t * u - data.f_L(u);
  const Eigen::Vector2d e = edge_equations(kind, t, u, v, data);
  r.r2 = e[0];
  r.r3 = e[1];
  return r;
}

EdgeTrace trace_edge(EdgeKind kind, const std::vector<double>& t_grid, const InitialData& data) {
  EdgeTrace out;
  const CatastrophePoint cp = breaking_point(data);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > cp.t_c)) throw DomainError("edge: every t must exceed t_c = " + std::to_string(cp.t_c));
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("edge: t grid must be strictly increasing");
  }
  if (t_grid.empty()) return out;

  // Continuation variable tau = sqrt(t - t_c), in which the branch is smooth.
  const double tau_first = std::sqrt(t_grid.front() - cp.t_c);
  double tau = std::min(tau_first, 1e-3);
  EdgeState cur;
  if (!newton_edge(kind, cp.t_c + tau * tau, edge_seed(kind, tau * tau, cp), data, cur)) {
    out.error = std::string(kind_name(kind)) + " edge: Newton failed at the catastrophe seed";
    return out;
  }
  double prev_tau = 0.0;
  EdgeState prev{cp.u_c, cp.u_c};
  double dtau = std::min(5e-3, tau);
  std::size_t next = 0;
  if (tau == tau_first) {
    out.rows.push_back(finish(kind, t_grid[0], cur, data));
    next = 1;
  }
  while (next < t_grid.size()) {
    const double target = std::sqrt(t_grid[next] - cp.t_c);
    const double step = std::min(dtau, target - tau);
    const double tau_new = (step == target - tau) ? target : tau + step;
    // Linear predictor in r = sqrt(1 + w), which reaches 0 at a finite time
    // when the edge runs into the minimum of u0.
    const double w = (tau_new - tau) / (tau - prev_tau);
    auto extrap = [w](double a, double b) {
      const double ra = std::sqrt(1.0 + a);
      const double r = ra + w * (ra - std::sqrt(1.0 + b));
      return r * r - 1.0;
    };
    const EdgeState pred{extrap(cur.u, prev.u), extrap(cur.v, prev.v)};
    EdgeState sol;
    const double t_new = tau_new == target ? t_grid[next] : cp.t_c + tau_new * tau_new;
    if (newton_edge(kind, t_new, pred, data, sol)) {
      prev_tau = tau;
      prev = cur;
      tau = tau_new;
      cur = sol;
      if (tau_new == target) {
        out.rows.push_back(finish(kind, t_grid[next], cur, data));
        ++next;
      }
      dtau = std::min(2e-2, 1.5 * dtau);
    } else {
      dtau *= 0.5;
      if (dtau < 1e-7) {
        out.error = std::string(kind_name(kind)) + " edge: continuation lost the solution after t = " +
                    std::to_string(cp.t_c + tau * tau) + " (end of the validity window)";
        return out;
      }
    }
  }
  return out;
}

namespace {

EdgeSolution solve_edge(EdgeKind kind, double t, const InitialData& data) {
  const CatastrophePoint cp = breaking_point(data);
  if (!(t > cp.t_c)) throw DomainError("edge: t must exceed t_c = " + std::to_string(cp.t_c));
  const EdgeTrace tr = trace_edge(kind, {t}, data);
  if (tr.rows.empty()) throw ConvergenceError(tr.error, {t});
  return tr.rows.front();
}

}  // namespace

EdgeSolution solve_leading_edge(double t, const InitialData& data) { return solve_edge(EdgeKind::leading, t, data); }

EdgeSolution solve_trailing_edge(double t, const InitialData& data) {
  return solve_edge(EdgeKind::trailing, t, data);
}

double EllipticAnsatz::modulus() const { return std::sqrt((beta2 - beta3) / (beta1 - beta3)); }

double EllipticAnsatz::alpha() const {
  const EllipticKE ke = complete_elliptic(modulus());
  return -beta1 + (beta1 - beta3) * ke.E / ke.K;
}

double EllipticAnsatz::tau_imag() const {
  const double s = modulus();
  const double K = complete_elliptic(s).K;
  const double Kp = complete_elliptic(std::sqrt((1.0 - s) * (1.0 + s))).K;
  return Kp / K;
}

EllipticAnsatz make_elliptic_ansatz(double beta1, double beta2, double beta3) {
  if (!(beta1 > beta2 && beta2 > beta3)) throw DomainError("elliptic ansatz: need beta1 > beta2 > beta3");
  EllipticAnsatz a;
  a.beta1 = beta1;
  a.beta2 = beta2;
  a.beta3 = beta3;
  if (!(a.modulus() < 1.0)) throw DomainError("elliptic ansatz: modulus reached 1 (soliton limit)");
  return a;
}

EllipticAnsatz make_elliptic_ansatz(double beta1, double beta2, double beta3, double q) {
  EllipticAnsatz a = make_elliptic_ansatz(beta1, beta2, beta3);
  a.q_phase = q;
  a.q_defaulted = false;
  return a;
}

double elliptic_phase(double x, double t, double eps, const EllipticAnsatz& a, double* kappa) {
  const double K = complete_elliptic(a.modulus()).K;
  const double k = std::sqrt(a.beta1 - a.beta3) / (2.0 * eps * K);
  if (kappa) *kappa = k;
  return k * (x - 2.0 * t * (a.beta1 + a.beta2 + a.beta3) - a.q_phase);
}

double elliptic_approx(double x, double t, double eps, const EllipticAnsatz& a) {
  if (!(eps > 0.0)) throw DomainError("elliptic_approx: eps must be positive");
  double kappa = 0.0;
  const double z = elliptic_phase(x, t, eps, a, &kappa);
  const ThetaDerivs th = theta3_derivs(z, a.tau_imag());
  const double r1 = th.d1 / th.value;
  return a.weak_limit() + 2.0 * eps * eps * kappa * kappa * (th.d2 / th.value - r1 * r1);
}

CatastropheScaling catastrophe_scaling(double x, double t, double eps, const CatastrophePoint& cp) {
  if (!(eps > 0.0)) throw DomainError("catastrophe_approx: eps must be positive");
  CatastropheScaling s;
  s.X = (x - cp.x_c - 6.0 * cp.u_c * (t - cp.t_c)) / std::pow(8.0 * cp.k * std::pow(eps, 6), 1.0 / 7.0);
  s.T = 6.0 * (t - cp.t_c) / std::pow(4.0 * cp.k * cp.k * cp.k * std::pow(eps, 4), 1.0 / 7.0);
  s.amplitude = std::pow(2.0 * eps * eps / (cp.k * cp.k), 1.0 / 7.0);
  return s;
}

double catastrophe_approx(double x, double t, double eps, const CatastrophePoint& cp, PI2Cache& cache) {
  const CatastropheScaling s = catastrophe_scaling(x, t, eps, cp);
  const auto sol = cache.get(s.T);
  return cp.u_c + s.amplitude * eval_pi2(*sol, s.X).value;
}

LeadingEdgeModel make_leading_model(const EdgeSolution& edge, const InitialData& data) {
  if (edge.kind != EdgeKind::leading) throw DomainError("leading-edge model needs a leading edge");
  LeadingEdgeModel m;
  m.edge = edge;
  const double du = edge.u - edge.v;
  m.c = -std::sqrt(du) * theta_derivs(edge.v, edge.u, data).d2_lambda;
  if (!(m.c > 0.0)) throw GenericityError("leading edge: c = -sqrt(u-v) theta_vv must be positive");
  auto f = [&](double xi) { return data.f_L1(xi) + 6.0 * edge.t; };
  m.phase_integral = 2.0 * integrate_jacobi(f, edge.v, edge.u, 0.0, 0.5, 1e-12);
  return m;
}

double LeadingEdgeModel::s_of(double x, double eps) const {
  return -(x - edge.x_edge) / (std::cbrt(c) * std::sqrt(edge.u - edge.v) * std::pow(eps, 2.0 / 3.0));
}

double LeadingEdgeModel::Theta(double x) const {
  return 2.0 * std::sqrt(edge.u - edge.v) * (x - edge.x_edge) + phase_integral;
}

double LeadingEdgeModel::amplitude(double eps) const { return 4.0 * std::cbrt(eps) / std::cbrt(c); }

double leading_edge_approx(double x, double eps, const LeadingEdgeModel& m, const HMGrid& hm) {
  if (!(eps > 0.0)) throw DomainError("leading_edge_approx: eps must be positive");
  const double q = eval_hm(hm, m.s_of(x, eps)).value;
  return m.edge.u - m.amplitude(eps) * q * std::cos(m.Theta(x) / eps);
}

double leading_edge_approx(double x, double t, double eps, const EdgeSolution& edge, const InitialData& data,
                           const HMGrid& hm) {
  if (edge.t != t) throw DomainError("leading_edge_approx: edge solved for a different t");
  return leading_edge_approx(x, eps, make_leading_model(edge, data), hm);
}

TrailingEdgeModel make_trailing_model(const EdgeSolution& edge, const InitialData& data) {
  if (edge.kind != EdgeKind::trailing) throw DomainError("trailing-edge model needs a trailing edge");
  TrailingEdgeModel m;
  m.edge = edge;
  const double dth = theta_derivs(edge.v, edge.u, data).d_lambda;
  if (!(-dth > 0.0)) throw GenericityError("trailing edge: -dtheta/dv must be positive");
  m.gamma = 4.0 * std::pow(edge.v - edge.u, 1.25) * std::sqrt(-dth);
  return m;
}

double TrailingEdgeModel::x_of(double y, double eps) const {
  return edge.x_edge + eps * std::log(eps) / (2.0 * std::sqrt(edge.v - edge.u)) * y;
}

double log_hk(int k) {
  return 0.5 * k * std::numbers::ln2 - 0.25 * std::log(std::numbers::pi) - 0.5 * std::lgamma(k + 1.0);
}

double trailing_edge_sum(double y, double eps, const TrailingEdgeModel& m, int* terms_used, int extra_terms) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("trailing_edge_approx: need 0 < eps < 1");
  const double log_n = -std::log(eps);
  const double log_gamma = std::log(m.gamma);
  const double log_sqrt2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  return sech2_series(
      log_n, [y](int k) { return 0.5 * (0.5 - y + k); },
      [=](int k) { return -(log_sqrt2pi + log_hk(k)) - (k + 0.5) * log_gamma; }, terms_used, extra_terms);
}

double trailing_edge_approx(double y, double eps, const TrailingEdgeModel& m) {
  return m.edge.u + 2.0 * (m.edge.v - m.edge.u) * trailing_edge_sum(y, eps, m);
}

double trailing_edge_approx(double y, double t, double eps, const EdgeSolution& edge, const InitialData& data) {
  if (edge.t != t) throw DomainError("trailing_edge_approx: edge solved for a different t");
  return trailing_edge_approx(y, eps, make_trailing_model(edge, data));
}

PhaseDiagram kdv_phase_diagram(const InitialData& data, const std::vector<double>& t_grid) {
  const EdgeTrace lead = trace_edge(EdgeKind::leading, t_grid, data);
  const EdgeTrace trail = trace_edge(EdgeKind::trailing, t_grid, data);
  PhaseDiagram pd;
  const std::size_t n = std::min(lead.rows.size(), trail.rows.size());
  for (std::size_t i = 0; i < n; ++i) pd.rows.push_back({t_grid[i], lead.rows[i].x_edge, trail.rows[i].x_edge});
  if (!lead.error.empty()) pd.error = lead.error;
  if (!trail.error.empty()) pd.error += (pd.error.empty() ? "" : "; ") + trail.error;
  return pd;
}

}  // namespace critasym
