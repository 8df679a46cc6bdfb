#pragma once

#include <string>
#include <vector>

#include "critasym/hopf.hpp"
#include "critasym/painleve.hpp"

namespace critasym {

enum class EdgeKind { leading, trailing };

/// Edge of the oscillation zone: x_edge = 6 t u + f_L(u) with (u, v)
/// solving the edge system (u > v leading, u < v trailing).
struct EdgeSolution {
  EdgeKind kind = EdgeKind::leading;
  double t = 0.0;
  double x_edge = 0.0;
  double u = 0.0;
  double v = 0.0;
  double residual = 0.0;  // max of the three equation residuals
};

/// Residuals of the three edge equations at the given state.
struct EdgeResiduals {
  double r1 = 0.0;  // x - 6 t u - f_L(u)
  double r2 = 0.0;  // 6 t + theta(v; u)
  double r3 = 0.0;  // d theta(v; u) / dv (leading) or the moment integral (trailing)
};
EdgeResiduals edge_residuals(EdgeKind kind, double t, double x, double u, double v, const InitialData& data);

/// int_u^v (6t + theta(lambda; u)) sqrt(lambda - u) d lambda by Gauss-Jacobi
/// quadrature with the square-root endpoint factor, converged to 1e-10.
double trailing_moment(double t, double u, double v, const InitialData& data);

/// Edge systems solved by continuation in sqrt(t - t_c) from the
/// catastrophe point. Loss of solvability is reported as ConvergenceError
/// whose last_iterate is {t reached, u, v}.
EdgeSolution solve_leading_edge(double t, const InitialData& data);
EdgeSolution solve_trailing_edge(double t, const InitialData& data);

/// Solutions along an ascending grid of times, all after t_c. Stops at the
/// first failure; `error` then holds the message and the rows cover the
/// times reached.
struct EdgeTrace {
  std::vector<EdgeSolution> rows;
  std::string error;
};
EdgeTrace trace_edge(EdgeKind kind, const std::vector<double>& t_grid, const InitialData& data);

/// Genus-one ansatz with branch points beta1 > beta2 > beta3 and phase q.
struct EllipticAnsatz {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double q_phase = 0.0;
  bool q_defaulted = true;  // q was not supplied by the caller

  double modulus() const;   // s with s^2 = (beta2 - beta3)/(beta1 - beta3)
  double alpha() const;     // -beta1 + (beta1 - beta3) E(s)/K(s)
  double tau_imag() const;  // K'(s)/K(s)
  double weak_limit() const { return beta1 + beta2 + beta3 + 2.0 * alpha(); }
};

/// Validates the ordering; q = nullopt-equivalent via q_defaulted.
EllipticAnsatz make_elliptic_ansatz(double beta1, double beta2, double beta3);
EllipticAnsatz make_elliptic_ansatz(double beta1, double beta2, double beta3, double q);

/// Phase argument z of the theta function and its x-derivative kappa.
double elliptic_phase(double x, double t, double eps, const EllipticAnsatz& a, double* kappa = nullptr);

double elliptic_approx(double x, double t, double eps, const EllipticAnsatz& a);

/// Double-scaling coordinates at the catastrophe point.
struct CatastropheScaling {
  double X = 0.0;
  double T = 0.0;
  double amplitude = 0.0;  // (2 eps^2 / k^2)^(1/7)
};
CatastropheScaling catastrophe_scaling(double x, double t, double eps, const CatastrophePoint& cp);

double catastrophe_approx(double x, double t, double eps, const CatastrophePoint& cp, PI2Cache& cache);

/// Constants of the leading-edge expansion, computed once per edge.
struct LeadingEdgeModel {
  EdgeSolution edge;
  double c = 0.0;               // -sqrt(u - v) d2theta/dv2 (v; u)
  double phase_integral = 0.0;  // 2 int_v^u (f_L' + 6t) sqrt(xi - v) dxi

  double s_of(double x, double eps) const;
  double Theta(double x) const;
  double amplitude(double eps) const;  // 4 eps^(1/3) / c^(1/3)
};
LeadingEdgeModel make_leading_model(const EdgeSolution& edge, const InitialData& data);

double leading_edge_approx(double x, double eps, const LeadingEdgeModel& model, const HMGrid& hm);
double leading_edge_approx(double x, double t, double eps, const EdgeSolution& edge, const InitialData& data,
                           const HMGrid& hm);

/// Constants of the trailing-edge expansion.
struct TrailingEdgeModel {
  EdgeSolution edge;
  double gamma = 0.0;  // 4 (v-u)^(5/4) sqrt(-dtheta/dv (v; u))

  /// Physical abscissa for the local coordinate y.
  double x_of(double y, double eps) const;
};
TrailingEdgeModel make_trailing_model(const EdgeSolution& edge, const InitialData& data);

/// log h_k with h_k = 2^(k/2) / (pi^(1/4) sqrt(k!)).
double log_hk(int k);

/// The sech^2 sum alone; `extra_terms` are summed past the cutoff.
double trailing_edge_sum(double y, double eps, const TrailingEdgeModel& model, int* terms_used = nullptr,
                         int extra_terms = 0);
double trailing_edge_approx(double y, double eps, const TrailingEdgeModel& model);
double trailing_edge_approx(double y, double t, double eps, const EdgeSolution& edge, const InitialData& data);

/// Rows (t, x^-(t), x^+(t)) continued along an ascending grid of t > t_c.
struct PhaseRow {
  double t = 0.0;
  double x_minus = 0.0;
  double x_plus = 0.0;
};
struct PhaseDiagram {
  std::vector<PhaseRow> rows;
  std::string error;  // empty when every grid time was reached
};
PhaseDiagram kdv_phase_diagram(const InitialData& data, const std::vector<double>& t_grid);

}  // namespace critasym
