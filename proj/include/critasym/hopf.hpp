#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace critasym {

using RealFn = std::function<double(double)>;

/// KdV initial profile u0 with a single minimum u0(x_M) = -1, together with
/// the inverse f_L of its decreasing branch (x < x_M) and derivatives.
/// Immutable after construction.
struct InitialData {
  std::string name;
  RealFn u0;
  RealFn u0_prime;
  RealFn u0_second;
  double x_M = 0.0;
  RealFn f_L;   // defined on (-1, 0)
  RealFn f_L1;  // f_L'
  RealFn f_L2;  // f_L''
  RealFn f_L3;  // f_L'''
  double domain_halfwidth = 12.0;
};

/// u0(x) = -sech^2(x) with closed-form inverse branch
/// f_L(u) = -log((1 + sqrt(1+u)) / sqrt(-u)).
InitialData make_sech2_data();

/// Natural cubic spline through samples (x, u0). The minimum must equal -1
/// to 1e-6 (it is then renormalised to exactly -1); f_L is obtained by
/// inverting the spline, f_L' and f_L'' from the inverse-function rule and
/// f_L''' by central differences.
InitialData make_tabulated_data(std::span<const double> x, std::span<const double> u0);

/// Reads a two-column CSV of (x, u0) samples (optional header line).
InitialData load_tabulated_csv(const std::string& path);

/// The profile u0(lambda * x).
InitialData scale_x(const InitialData& data, double lambda);

/// Point of gradient catastrophe of the Hopf solution.
struct CatastrophePoint {
  double x_c = 0.0;
  double t_c = 0.0;
  double u_c = 0.0;
  double xi_c = 0.0;
  double k = 0.0;  // -f_L'''(u_c)
};

/// Solution u = u0(xi) of the characteristic equation x = 6 t u0(xi) + xi.
/// Throws AmbiguityError (listing every branch) when the characteristics
/// cross at (x, t).
double hopf_solve(double x, double t, const InitialData& data);

/// Characteristic foot xi for (x, t); same contract as hopf_solve.
double hopf_characteristic(double x, double t, const InitialData& data);

/// t_c = 1 / max(-6 u0'), with the maximiser refined as a root of u0''.
CatastrophePoint breaking_point(const InitialData& data);

struct ThetaValue {
  double value = 0.0;
  double d_lambda = 0.0;   // first derivative in lambda
  double d2_lambda = 0.0;  // second derivative in lambda
};

/// theta(lambda; u) = 1/(2 sqrt 2) int_{-1}^{1} f_L'((1+m)/2 lambda + (1-m)/2 u) / sqrt(1-m) dm,
/// by Gauss-Jacobi quadrature doubled until successive values agree to 1e-10.
double theta_of(double lambda, double u, const InitialData& data);

/// theta together with its lambda-derivatives (differentiated under the
/// integral sign using f_L'' and f_L''').
ThetaValue theta_derivs(double lambda, double u, const InitialData& data);

}  // namespace critasym
