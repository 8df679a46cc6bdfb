#pragma once

#include <string>
#include <utility>
#include <vector>

#include "critasym/core/polynomial.hpp"

namespace critasym {

/// The quartic family V_{x,t}(s) = e^x [ (1-t) s^2/2 + t (s^4/20 - 4 s^3/15 + s^2/5 + 8 s/5) ].
struct QuarticField {
  double x = 0.0;
  double t = 0.0;
};

struct FieldValue {
  double V = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
};
FieldValue field_eval(const QuarticField& f, double s);
Polynomial potential(const QuarticField& f);

/// x* = -log(245/9), the end of the one-cut regime on t = 9.
double x_star();

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

/// One-cut measure with density sqrt((b-s)(s-a)) h(s) on [a, b] and
/// Lagrange constant ell of the field it was built for.
struct EquilibriumMeasure {
  std::vector<Interval> intervals;
  Polynomial h;
  double ell = 0.0;

  double density(double s) const;
  double mass() const;
  /// int log|s - y| dmu(y), exact for polynomial h.
  double log_potential(double s) const;
};

/// Semicircle of the Gaussian line t = 0.
EquilibriumMeasure measure_gaussian(double x);
/// x = 0, 0 < t <= 1; density with sqrt(4 - s^2) on [-2, 2].
EquilibriumMeasure measure_line_t(double t);
/// t = 9, x <= x*.
EquilibriumMeasure measure_t9(double x);
double t9_b(double x);
double t9_C(double x);

struct VariationalResidual {
  double eq_residual = 0.0;   // half the spread of 2 int log|s-y| dmu - V over support probes
  double ineq_margin = 0.0;   // min over exterior probes of (ell - lhs); negative means violation
  double ell = 0.0;           // midrange of the lhs over support probes
};
VariationalResidual variational_residual(const EquilibriumMeasure& mu, const QuarticField& f,
                                         const std::vector<double>& probe_grid);
/// Support samples plus exterior samples on [a - 3, b + 3].
std::vector<double> default_probe_grid(const EquilibriumMeasure& mu, int n = 400);

/// Residuals of the one-cut endpoint conditions
///   (1/pi) int V'(y) / sqrt((b-y)(y-a)) dy = 0,  (1/pi) int y V'(y) / sqrt((b-y)(y-a)) dy = 2.
std::pair<double, double> onecut_conditions(const Polynomial& V, double a, double b);

/// Endpoints of the one-cut measure for V. Throws NotOneCutError on Newton
/// failure or a negative density.
Interval solve_onecut_endpoints(const Polynomial& V);
Interval solve_onecut_endpoints(const QuarticField& f);

/// Measure built from V and its one-cut endpoints; no sign check on h.
EquilibriumMeasure onecut_measure(const Polynomial& V, const Interval& support);

enum class SingularityKind { none, exterior_I, interior_II, edge_III };
std::string to_string(SingularityKind k);

struct SingularityReport {
  SingularityKind kind = SingularityKind::none;
  double location = 0.0;
  double margin = 0.0;     // smallest of the three normalised margins
  bool ambiguous = false;  // more than one condition triggered
  double margin_I = 0.0;   // ell - lhs at exterior local minima (inf when none)
  double margin_II = 0.0;  // min of h / max h over the open support
  double margin_III = 0.0; // min of h / max h at the endpoints
};
SingularityReport classify(const EquilibriumMeasure& mu, const QuarticField& f);
SingularityReport classify(const EquilibriumMeasure& mu, const Polynomial& V);

struct PhaseCell {
  double x = 0.0;
  double t = 0.0;
  std::string cls;       // one_cut | exterior_I | interior_II | edge_III | not_one_cut | failure
  double margin = 0.0;   // signed: negative once the one-cut candidate is inadmissible
  double a = 0.0;
  double b = 0.0;
  std::string message;   // failure detail
};
struct BreakingPoint {
  double t = 0.0;
  double x = 0.0;
  std::string kind;      // exterior_I or interior_II, by the margin that changes sign
};
struct RmtPhaseDiagram {
  std::vector<PhaseCell> cells;  // row-major in t, then x
  std::vector<BreakingPoint> curves;
};
PhaseCell rmt_phase_cell(double x, double t);
RmtPhaseDiagram rmt_phase_diagram(const std::vector<double>& x_grid, const std::vector<double>& t_grid);

}  // namespace critasym
