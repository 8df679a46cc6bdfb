#pragma once

#include <functional>
#include <string>
#include <vector>

#include "critasym/core/polynomial.hpp"
#include "critasym/core/sech_series.hpp"
#include "critasym/painleve.hpp"
#include "critasym/rmt_eq.hpp"

namespace critasym {

/// Orthonormal recurrence s p_n = gamma_{n+1} p_{n+1} + beta_n p_n + gamma_n p_{n-1}
/// for the weight exp(-N V). gamma[0] is unused (0); gamma[n], beta[n] and
/// kappa[n] are indexed by n up to n_max.
struct RecurrenceTable {
  int N = 0;
  Polynomial V;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> kappa;      // leading coefficients; may under/overflow, see log_kappa
  std::vector<double> log_kappa;
  int digits = 0;                 // working precision of the inner products
  int nodes = 0;
  double lo = 0.0, hi = 0.0;      // truncation interval of the weight
  double boundary_mass = 0.0;     // max over n of the p_n^2 w mass in the two outer panels
};

struct RecurrenceOptions {
  int panels = 0;   // Gauss-Legendre panels on [lo, hi]; 0 selects 64 + 4 n_max
  int n_cap = 64;   // desk cap on n_max
};

/// Discretised Stieltjes procedure in 50-digit arithmetic. Throws DomainError
/// for odd degree, non-positive leading coefficient or n_max above the caps,
/// and PrecisionError(n) if gamma_n^2 loses positivity.
RecurrenceTable compute_recurrence(const Polynomial& V, int N, int n_max, const RecurrenceOptions& opt = {});
RecurrenceTable compute_recurrence(const QuarticField& f, int N, int n_max, const RecurrenceOptions& opt = {});

/// p_0(s), ..., p_n(s) from the table's recurrence (double precision).
std::vector<double> orthonormal_values(const RecurrenceTable& table, int n, double s);

struct PartitionValue {
  int n = 0;
  double logZ = 0.0;
};
/// log Z_n = log n! - 2 sum_{j<n} log kappa_j.
PartitionValue partition_log(const RecurrenceTable& table, int n);

struct RecurrenceLimit {
  double gamma = 0.0;
  double beta = 0.0;
};
RecurrenceLimit asym_onecut(double a, double b);

/// Data of a measure C sqrt((s-a)(b-s)) (s - s*)^2 at x = x*.
struct InteriorCritical {
  double a = 0.0;
  double b = 0.0;
  double s_star = 0.0;
  double C = 0.0;
  double x_star = 0.0;
  double origin = 0.0;  // lower limit of omega and centre of theta
  double omega = 0.0;   // integral of the density over [origin, b]
};
/// The t = 9 critical point with its printed endpoints. The printed phase
/// constants use origin 0; origin = s* removes the spurious beta oscillation
/// of this symmetric field.
InteriorCritical interior_critical_t9(double origin = 0.0);

struct InteriorAsymptotics {
  double gamma = 0.0;
  double beta = 0.0;
  double s = 0.0;       // s_{x,n}
  double c = 0.0;
  double theta = 0.0;
  double q = 0.0;
  bool outside_scaling = false;  // s_{x,n} > n^(1/6)
};
InteriorAsymptotics asym_interior(double x, int n, const InteriorCritical& crit, const HMGrid& hm);

struct EdgeConstants {
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};
EdgeConstants edge_constants();

struct EdgeAsymptotics {
  double gamma = 0.0;
  double beta = 0.0;
  double X = 0.0;
  double T = 0.0;
  double U = 0.0;
};
/// Throws DomainError when the scaling arguments leave the solved P_I^2 domain.
EdgeAsymptotics asym_edge(double x, double t, int n, PI2Cache& cache);

struct ExteriorParams {
  double a = 0.0;
  double b = 0.0;
  double c0 = 1.0;
  double c1 = 0.0;
  std::function<double(double, int)> c2;  // c2(y, k)
  std::function<double(int)> c3;          // c3(k)
};
struct ExteriorAsymptotics {
  double gamma = 0.0;
  double beta = 0.0;
  double sum = 0.0;
  int terms = 0;
  bool conjectural = true;  // the formula is an unproved ansatz
};
ExteriorAsymptotics conjectured_exterior(double y, double n, const ExteriorParams& p);

enum class AsymKind { regular, interior, edge };
std::string to_string(AsymKind k);

struct AsymRow {
  int n = 0;
  double gamma = 0.0;
  double beta = 0.0;
  double gamma_asym = 0.0;
  double beta_asym = 0.0;
  double err_gamma = 0.0;
  double err_beta = 0.0;
  double deviation = 0.0;  // |gamma_n - (b-a)/4|
};
struct AsymComparison {
  AsymKind kind = AsymKind::regular;
  double a = 0.0, b = 0.0;
  std::vector<AsymRow> rows;
  double exponent = 0.0;            // log-log slope of err_gamma
  double deviation_exponent = 0.0;  // log-log slope of deviation
};
/// Each row n uses the weight exp(-N V); N <= 0 means N = n.
AsymComparison compare_asymptotics(const QuarticField& f, int N, int n_lo, int n_hi, AsymKind kind);

/// Least-squares slope of log|e| against log n, skipping zero entries.
double loglog_slope(const std::vector<int>& n, const std::vector<double>& e);

}  // namespace critasym
