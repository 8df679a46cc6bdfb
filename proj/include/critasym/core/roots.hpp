#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>

namespace critasym {

struct RootConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-14;
  int max_iter = 50;
  std::optional<std::pair<double, double>> bracket;

  void validate() const;
};

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct NewtonResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_norm = 0.0;  // max-norm of F(x)
};

/// Newton's method with backtracking on the max-norm of F. Without an
/// analytic Jacobian, columns are central differences with step
/// eps^(1/3) * max(1, |x_j|). Stops once ||F(x)||_inf <= abs_tol, or when
/// the Newton step falls below rel_tol * max(1, ||x||) and the residual is
/// within 100 * abs_tol.
NewtonResult newton_solve(const VectorFn& F, const Eigen::VectorXd& x0, const RootConfig& cfg,
                          const JacobianFn& jacobian = {});

/// Central-difference Jacobian used by newton_solve.
Eigen::MatrixXd fd_jacobian(const VectorFn& F, const Eigen::VectorXd& x);

/// Scalar root on a sign-changing bracket (TOMS 748).
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           const RootConfig& cfg = {});

}  // namespace critasym
