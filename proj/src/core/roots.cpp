#include "critasym/core/roots.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "critasym/errors.hpp"

namespace critasym {

void RootConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("RootConfig: tolerances must be > 0");
  if (max_iter < 1) throw DomainError("RootConfig: max_iter must be >= 1");
}

Eigen::MatrixXd fd_jacobian(const VectorFn& F, const Eigen::VectorXd& x) {
  const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  const Eigen::Index n = x.size();
  Eigen::MatrixXd J;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = h0 * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Eigen::VectorXd fp = F(xp);
    const Eigen::VectorXd fm = F(xm);
    if (j == 0) J.resize(fp.size(), n);
    J.col(j) = (fp - fm) / (xp[j] - xm[j]);
  }
  return J;
}

namespace {
std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
}  // namespace

NewtonResult newton_solve(const VectorFn& F, const Eigen::VectorXd& x0, const RootConfig& cfg,
                          const JacobianFn& jacobian) {
  cfg.validate();
  NewtonResult res;
  res.x = x0;
  Eigen::VectorXd f = F(res.x);
  double norm = f.lpNorm<Eigen::Infinity>();
  if (!std::isfinite(norm)) throw ConvergenceError("newton_solve: non-finite residual at x0", to_std(x0));
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (norm <= cfg.abs_tol) {
      res.iterations = it;
      res.residual_norm = norm;
      return res;
    }
    const Eigen::MatrixXd J = jacobian ? jacobian(res.x) : fd_jacobian(F, res.x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) {
      throw SingularJacobianError("newton_solve: singular Jacobian at iteration " + std::to_string(it));
    }
    const Eigen::VectorXd step = lu.solve(-f);
    if (!step.allFinite()) throw SingularJacobianError("newton_solve: non-finite Newton step");

    double lambda = 1.0;
    Eigen::VectorXd x_new;
    Eigen::VectorXd f_new;
    double norm_new = std::numeric_limits<double>::infinity();
    for (int ls = 0; ls < 30; ++ls) {
      x_new = res.x + lambda * step;
      f_new = F(x_new);
      norm_new = f_new.lpNorm<Eigen::Infinity>();
      if (std::isfinite(norm_new) && norm_new < (1.0 - 1e-4 * lambda) * norm) break;
      lambda *= 0.5;
    }
    if (!std::isfinite(norm_new)) {
      throw ConvergenceError("newton_solve: line search produced non-finite residual", to_std(res.x));
    }
    const double step_size = lambda * step.lpNorm<Eigen::Infinity>();
    // Accept even a non-decreasing step once the line search is exhausted;
    // the stagnation test below decides whether that is good enough.
    res.x = x_new;
    f = f_new;
    norm = norm_new;
    if (step_size <= cfg.rel_tol * std::max(1.0, res.x.lpNorm<Eigen::Infinity>()) &&
        norm <= 100.0 * cfg.abs_tol) {
      res.iterations = it + 1;
      res.residual_norm = norm;
      return res;
    }
  }
  if (norm <= cfg.abs_tol) {
    res.iterations = cfg.max_iter;
    res.residual_norm = norm;
    return res;
  }
  throw ConvergenceError("newton_solve: no convergence after " + std::to_string(cfg.max_iter) +
                             " iterations (residual " + std::to_string(norm) + ")",
                         to_std(res.x));
}

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           const RootConfig& cfg) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw DomainError("find_root_bracketed: no sign change on bracket");
  boost::uintmax_t iters = static_cast<boost::uintmax_t>(std::max(cfg.max_iter, 200));
  auto tol = [&](double a, double b) {
    return std::abs(b - a) <= std::max(cfg.abs_tol * 1e-3, 4.0 * std::numeric_limits<double>::epsilon() *
                                                               std::max(std::abs(a), std::abs(b)));
  };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace critasym
