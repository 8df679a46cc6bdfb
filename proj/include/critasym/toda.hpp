#pragma once

#include <functional>
#include <map>
#include <vector>

#include "critasym/core/polynomial.hpp"
#include "critasym/orthopoly.hpp"

namespace critasym {

/// Flaschka variables on the truncated lattice n = 0..n_max with Dirichlet
/// ends gamma_0 = gamma_{n_max+1} = 0. gamma[0] is stored as 0.
struct TodaState {
  double eps = 0.0;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::map<int, double> times;
  double drift = 0.0;  // spectral drift of the last flow

  int n_max() const { return static_cast<int>(beta.size()) - 1; }
};

/// gamma_n^2 = n eps, beta_n = 0: the string solution for V0 = s^2/2.
TodaState gaussian_state(double eps, int n_max);
TodaState state_from_recurrence(const RecurrenceTable& table);
/// Samples u_n = log gamma_n^2 = u(eps n), v_n = -beta_n = v(eps n).
TodaState state_from_profiles(const std::function<double(double)>& u, const std::function<double(double)>& v,
                              double eps, int n_max);

/// Sorted eigenvalues of the truncated Jacobi matrix Q.
std::vector<double> jacobi_spectrum(const TodaState& s);

/// Explicit RK4 for eps d gamma_n/dt1 = gamma_n (beta_{n-1} - beta_n)/2,
/// eps d beta_n/dt1 = gamma_n^2 - gamma_{n+1}^2. Throws StabilityError when
/// the spectrum drifts by more than 1e-6.
TodaState flow_t1(const TodaState& s, double dt, int steps);
/// Hierarchy flow t_k, 1 <= k <= 4, with [Q^k] from the truncated matrix.
TodaState flow_hierarchy(const TodaState& s, int k, double dt, int steps);

struct StringResidual {
  std::vector<int> n;  // interior rows
  std::vector<double> res1;
  std::vector<double> res2;
  double max_abs = 0.0;
};
/// res1_n = gamma_n [V'(Q)]_{n,n-1} - n eps, res2_n = [V'(Q)]_{n,n}, on rows
/// unaffected by the truncation.
StringResidual string_residual(const TodaState& s, const Polynomial& V);

/// f(r+, r-) of the hodograph solution as an exact bivariate polynomial.
class HodographPotential {
 public:
  explicit HodographPotential(const Polynomial& V0);
  /// d^{p+q} f / dr+^p dr-^q.
  double derivative(double rp, double rm, int p, int q) const;
  double operator()(double rp, double rm) const { return derivative(rp, rm, 0, 0); }

 private:
  std::vector<std::vector<double>> c_;  // c_[i][j] multiplies rp^i rm^j
};

struct HodographPoint {
  double x = 0.0;
  double t = 0.0;
  double r_plus = 0.0;
  double r_minus = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double residual = 0.0;
};
/// Solves x = lambda_pm t + f_pm(r+, r-). Throws SingularJacobianError at a
/// catastrophe and ConvergenceError when no seed converges.
HodographPoint hodograph_solve(double x, double t, const Polynomial& V0);
/// gamma = (r+ - r-)/4, beta = -(r+ + r-)/2 at x = eps n, n = 1..n_max.
TodaState state_from_hodograph(const Polynomial& V0, double t, double eps, int n_max);

/// Max over interior nodes of the gap between the lattice right-hand sides
/// of the continuum Toda system and their O(eps) truncation, derivatives by
/// fourth-order differences. Nodes with eps n < x_min are skipped; hodograph
/// data has a square-root endpoint at x = 0.
double continuum_residual(const TodaState& s, double x_min = 0.0);

struct CriticalPoint {
  double x = 0.0;
  double t = 0.0;
  double r_plus = 0.0;
  double r_minus = 0.0;
};
/// Gradient catastrophe of r+: -t/4 + f_{++} = 0, f_{+++} = 0 on the hodograph.
CriticalPoint locate_catastrophe(const Polynomial& V0);

struct CatastropheConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};
/// Throws GenericityError if f_{++++} or -t/4 + f_{--} vanishes.
CatastropheConstants catastrophe_constants(const Polynomial& V0, const CriticalPoint& cp);

}  // namespace critasym
