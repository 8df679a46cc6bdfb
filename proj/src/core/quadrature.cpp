#include "critasym/core/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "critasym/errors.hpp"

namespace critasym {

double QuadratureRule::apply(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
  return sum;
}

namespace {

QuadratureRule golub_welsch_jacobi(int n, double alpha, double beta) {
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      diag[k] = (beta - alpha) / (ab + 2.0);
    } else {
      const double s = 2.0 * k + ab;
      diag[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub[k - 1] = std::sqrt(b2);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));

  QuadratureRule rule;
  rule.kind = (alpha == 0.0 && beta == 0.0) ? QuadratureKind::GaussLegendre
                                            : QuadratureKind::GaussJacobi;
  rule.alpha = alpha;
  rule.beta = beta;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    throw AccuracyError("gauss_jacobi_rule: tridiagonal eigensolver failed");
  }
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  // Symmetric weight: symmetrize to remove eigensolver noise.
  if (alpha == beta) {
    for (int i = 0; i < n / 2; ++i) {
      const int j = n - 1 - i;
      const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
      const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
      rule.nodes[i] = -x;
      rule.nodes[j] = x;
      rule.weights[i] = rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_jacobi_rule(int n, double alpha, double beta) {
  if (n < 1) throw DomainError("gauss_jacobi_rule: n must be >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw DomainError("gauss_jacobi_rule: exponents must exceed -1");
  }
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, std::unique_ptr<QuadratureRule>> cache;
  const auto key = std::make_tuple(n, alpha, beta);
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto rule = std::make_unique<QuadratureRule>(golub_welsch_jacobi(n, alpha, beta));
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(rule));
  return *it->second;
}

const QuadratureRule& gauss_legendre_rule(int n) { return gauss_jacobi_rule(n, 0.0, 0.0); }

QuadratureRule trapezoid_periodic_rule(int n) {
  if (n < 2) throw DomainError("trapezoid_periodic_rule: n must be >= 2");
  QuadratureRule rule;
  rule.kind = QuadratureKind::TrapezoidPeriodic;
  rule.nodes.resize(n);
  rule.weights.assign(n, 2.0 * std::numbers::pi / n);
  for (int i = 0; i < n; ++i) rule.nodes[i] = 2.0 * std::numbers::pi * i / n;
  return rule;
}

double integrate_jacobi(const std::function<double(double)>& f, double a, double b, double alpha,
                        double beta, double tol, int n0, int n_max) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  const double scale = std::pow(half, alpha + beta + 1.0);
  auto eval = [&](int n) {
    const QuadratureRule& rule = gauss_jacobi_rule(n, alpha, beta);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return sum * scale;
  };
  double prev = eval(n0);
  for (int n = 2 * n0; n <= n_max; n *= 2) {
    const double cur = eval(n);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw AccuracyError("integrate_jacobi: no convergence up to " + std::to_string(n_max) + " nodes");
}

}  // namespace critasym
