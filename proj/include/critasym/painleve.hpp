#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "critasym/core/spectral_bvp.hpp"

namespace critasym {

/// Pole-free solution U(X, T) of the fourth-order P_I^2 equation
///   X = T U - [U^3/6 + (U_X^2 + 2 U U_XX)/24 + U_XXXX/240]
/// on [-L, L]. Node values are stored in ascending X.
struct PI2Solution {
  double T = 0.0;
  double L = 0.0;
  std::vector<double> X_grid;
  std::vector<double> U;
  std::vector<double> U1, U2, U3, U4;  // X-derivatives
  double residual_norm = 0.0;          // max |equation| off the collocation nodes
  // Mismatch |U - two-term asymptote| ~ C |X|^p fitted on the interior.
  double tail_C = 0.0;
  double tail_exponent = 0.0;
  SpectralSolution raw;
};

/// Two-term large-|X| expansion of U and its X-derivative.
double pi2_asymptote(double X, double T);
double pi2_asymptote_prime(double X, double T);

/// Collocation solve with Dirichlet data (U, U_X) from the two-term
/// expansion at +-L. n_points is the number of distinct grid nodes (>= 200).
/// `guess` may be a solution for a nearby T on the same domain.
PI2Solution solve_pi2(double T, double L = 50.0, int n_points = 4001, const PI2Solution* guess = nullptr);

/// solve_pi2 reached by continuation from T = 0 in steps of at most 0.25.
PI2Solution solve_pi2_continued(double T, double L = 50.0, int n_points = 4001);

/// Thread-safe store of P_I^2 solutions keyed by T. A missing T is reached
/// by continuation from the nearest stored solution.
class PI2Cache {
 public:
  explicit PI2Cache(double L = 50.0, int n_points = 4001) : L_(L), n_points_(n_points) {}
  std::shared_ptr<const PI2Solution> get(double T);
  double L() const { return L_; }

 private:
  double L_;
  int n_points_;
  std::mutex mu_;
  std::map<double, std::shared_ptr<const PI2Solution>> store_;
};

/// Hastings-McLeod solution of q'' = s q + 2 q^3 on [-S, S].
struct HMGrid {
  double S = 0.0;
  std::vector<double> s_grid;
  std::vector<double> q_values;
  double residual_norm = 0.0;
  SpectralSolution raw;
};

/// BVP solve with q(-S) = sqrt(S/2), q(S) = Ai(S). Throws BranchError if
/// the converged profile is not positive.
HMGrid solve_hastings_mcleod(double S = 10.0, int n_points = 801);

struct Evaluated {
  double value = 0.0;
  bool extrapolated = false;  // asymptote used outside the solved domain
};

Evaluated eval_pi2(const PI2Solution& sol, double X);
Evaluated eval_hm(const HMGrid& grid, double s);

/// Two-column CSV dumps (X,U) and (s,q).
void write_pi2_csv(const PI2Solution& sol, const std::string& path);
void write_hm_csv(const HMGrid& grid, const std::string& path);

}  // namespace critasym
