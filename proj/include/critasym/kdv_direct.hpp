#pragma once

#include <vector>

#include "critasym/hopf.hpp"

namespace critasym {

/// Snapshot of a periodic KdV solution u_t + 6 u u_x + eps^2 u_xxx = 0 on
/// [-P, P) sampled at 2^m equispaced points. Immutable once returned.
struct KdVField {
  double P = 0.0;
  int m = 0;
  double eps = 0.0;
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> u;

  // Diagnostics of the run that produced the field.
  double mass_drift = 0.0;     // |M(t) - M(0)| / |M(0)|, M = int u dx
  double l2_drift = 0.0;       // same for int u^2 dx
  double spectral_tail = 0.0;  // largest mode in the top quarter of the kept band / largest mode
  double edge_max = 0.0;       // max |u| on the outer 5% of the period at t
  long steps = 0;
};

struct KdVOptions {
  double tol = 1e-10;             // relative step tolerance of the embedded pair
  double tail_limit = 1e-6;       // spectral tail that triggers ResolutionError
  double blowup_factor = 1e3;     // max |u| growth that triggers StabilityError
};

/// Fourier pseudospectral solve with the dispersive term removed by an exact
/// integrating factor, Dormand-Prince 5(4) steps on the nonlinear term and
/// 2/3-rule dealiasing. Needs |u0(+-P)| < 1e-8 and grid spacing < eps/4.
KdVField solve_kdv(const RealFn& u0, double eps, double t_final, double P, int m, const KdVOptions& opt = {});
KdVField solve_kdv(const InitialData& data, double eps, double t_final, double P, int m,
                   const KdVOptions& opt = {});

/// Trigonometric interpolant of the field at x (periodically wrapped).
double probe(const KdVField& field, double x);
std::vector<double> probe(const KdVField& field, const std::vector<double>& xs);

/// max |u - ref(x)| over grid points with x_lo <= x <= x_hi.
double max_deviation(const KdVField& field, const RealFn& ref, double x_lo, double x_hi);

}  // namespace critasym
