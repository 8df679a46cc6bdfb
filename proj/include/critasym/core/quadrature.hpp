#pragma once

#include <functional>
#include <vector>

namespace critasym {

enum class QuadratureKind { GaussLegendre, GaussJacobi, TrapezoidPeriodic };

/// Nodes and positive weights on the reference interval ([-1,1] for the Gauss
/// families, [0, 2*pi) for the periodic trapezoid rule).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadratureKind kind = QuadratureKind::GaussLegendre;
  double alpha = 0.0;  // exponent at x = +1 (Gauss-Jacobi only)
  double beta = 0.0;   // exponent at x = -1 (Gauss-Jacobi only)

  std::size_t size() const { return nodes.size(); }

  /// Sum of w_i f(x_i).
  double apply(const std::function<double(double)>& f) const;
};

/// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1,1],
/// computed by Golub-Welsch. Rules are cached per (n, alpha, beta), so
/// repeated calls are cheap and thread safe.
const QuadratureRule& gauss_jacobi_rule(int n, double alpha, double beta);

/// Gauss-Legendre is Gauss-Jacobi with alpha = beta = 0.
const QuadratureRule& gauss_legendre_rule(int n);

/// Equispaced periodic trapezoid rule on [0, 2 pi).
QuadratureRule trapezoid_periodic_rule(int n);

/// Integrates f(y) (b-y)^alpha (y-a)^beta over [a,b] by Gauss-Jacobi,
/// doubling the node count from n0 until two successive results agree to
/// `tol` (absolute, relative to max(1,|I|)). Throws AccuracyError if n_max is
/// reached without agreement.
double integrate_jacobi(const std::function<double(double)>& f, double a, double b, double alpha,
                        double beta, double tol = 1e-12, int n0 = 16, int n_max = 1024);

}  // namespace critasym
