#include "critasym/core/spectral_bvp.hpp"

#include <Eigen/SparseLU>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "critasym/errors.hpp"

namespace critasym {

std::vector<double> lobatto_nodes(int order) {
  std::vector<double> x(order + 1);
  for (int j = 0; j <= order; ++j) x[j] = -std::cos(std::numbers::pi * j / order);
  // Exact symmetry.
  for (int j = 0; j <= order / 2; ++j) {
    const double v = 0.5 * (x[order - j] - x[j]);
    x[j] = -v;
    x[order - j] = v;
  }
  if (order % 2 == 0) x[order / 2] = 0.0;
  return x;
}

namespace {

std::vector<double> lobatto_bary_weights(int order) {
  std::vector<double> w(order + 1);
  for (int j = 0; j <= order; ++j) {
    w[j] = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == order) w[j] *= 0.5;
  }
  return w;
}

double bary_eval(const std::vector<double>& nodes, const std::vector<double>& w,
                 const double* vals, int stride, double t) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double d = t - nodes[j];
    if (d == 0.0) return vals[j * stride];
    const double c = w[j] / d;
    num += c * vals[j * stride];
    den += c;
  }
  return num / den;
}

}  // namespace

Eigen::MatrixXd lobatto_diff_matrix(int order) {
  const auto x = lobatto_nodes(order);
  const auto w = lobatto_bary_weights(order);
  const int n = order + 1;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      D(i, j) = (w[j] / w[i]) / (x[i] - x[j]);
      diag -= D(i, j);
    }
    D(i, i) = diag;
  }
  return D;
}

SpectralMesh SpectralMesh::graded(std::vector<double> breaks, int order) {
  if (breaks.size() < 2) throw DomainError("SpectralMesh::graded: need >= 2 breakpoints");
  for (std::size_t i = 1; i < breaks.size(); ++i)
    if (!(breaks[i] > breaks[i - 1])) throw DomainError("SpectralMesh::graded: breakpoints must increase");
  SpectralMesh m;
  m.a = breaks.front();
  m.b = breaks.back();
  m.elements = static_cast<int>(breaks.size()) - 1;
  m.order = order;
  m.breaks = std::move(breaks);
  return m;
}

SpectralSolution::SpectralSolution(SpectralMesh mesh, int m) : mesh_(std::move(mesh)), m_(m) {
  if (mesh_.elements < 1 || mesh_.order < 2) throw DomainError("SpectralMesh: need >= 1 element, order >= 2");
  if (!mesh_.breaks.empty() && static_cast<int>(mesh_.breaks.size()) != mesh_.elements + 1)
    throw DomainError("SpectralMesh: breaks must have elements + 1 entries");
  data_ = Eigen::MatrixXd::Zero(mesh_.elements * mesh_.nodes_per_element(), m);
}

double SpectralSolution::node(int e, int j) const {
  static thread_local int cached_order = -1;
  static thread_local std::vector<double> ref;
  if (cached_order != mesh_.order) {
    ref = lobatto_nodes(mesh_.order);
    cached_order = mesh_.order;
  }
  const double left = mesh_.left(e);
  if (j == 0) return left;
  if (j == mesh_.order) return mesh_.right(e);
  return left + 0.5 * mesh_.width(e) * (ref[j] + 1.0);
}

int SpectralSolution::element_of(double x) const {
  int e;
  if (mesh_.breaks.empty()) {
    e = static_cast<int>(std::floor((x - mesh_.a) / (mesh_.b - mesh_.a) * mesh_.elements));
  } else {
    e = static_cast<int>(std::upper_bound(mesh_.breaks.begin(), mesh_.breaks.end(), x) - mesh_.breaks.begin()) - 1;
  }
  return std::clamp(e, 0, mesh_.elements - 1);
}

double SpectralSolution::eval(double x, int comp) const {
  const int e = element_of(x);
  for (int j = 0; j <= mesh_.order; ++j)
    if (node(e, j) == x) return value(e, j, comp);
  const double h = mesh_.width(e);
  const double t = 2.0 * (x - mesh_.left(e)) / h - 1.0;
  static thread_local int cached_order = -1;
  static thread_local std::vector<double> nodes, w;
  if (cached_order != mesh_.order) {
    nodes = lobatto_nodes(mesh_.order);
    w = lobatto_bary_weights(mesh_.order);
    cached_order = mesh_.order;
  }
  return bary_eval(nodes, w, data_.data() + data_.rows() * comp + index(e, 0), 1, t);
}

double SpectralSolution::eval_derivative(double x, int comp) const {
  const int e = element_of(x);
  const double h = mesh_.width(e);
  const double t = 2.0 * (x - mesh_.left(e)) / h - 1.0;
  const int n = mesh_.nodes_per_element();
  static thread_local int cached_order = -1;
  static thread_local std::vector<double> nodes, w;
  static thread_local Eigen::MatrixXd D;
  if (cached_order != mesh_.order) {
    nodes = lobatto_nodes(mesh_.order);
    w = lobatto_bary_weights(mesh_.order);
    D = lobatto_diff_matrix(mesh_.order);
    cached_order = mesh_.order;
  }
  const Eigen::VectorXd local = data_.block(index(e, 0), comp, n, 1);
  const Eigen::VectorXd dlocal = (2.0 / h) * (D * local);
  return bary_eval(nodes, w, dlocal.data(), 1, t);
}

std::vector<double> SpectralSolution::unique_nodes() const {
  std::vector<double> xs;
  for (int e = 0; e < mesh_.elements; ++e)
    for (int j = (e == 0 ? 0 : 1); j <= mesh_.order; ++j) xs.push_back(node(e, j));
  return xs;
}

std::vector<double> SpectralSolution::unique_values(int comp) const {
  std::vector<double> vs;
  for (int e = 0; e < mesh_.elements; ++e)
    for (int j = (e == 0 ? 0 : 1); j <= mesh_.order; ++j) vs.push_back(value(e, j, comp));
  return vs;
}

SpectralSolution solve_bvp(const BvpSystem& sys, const SpectralSolution& guess,
                           const BvpOptions& opts, BvpReport* report) {
  const SpectralMesh& mesh = guess.mesh();
  const int m = sys.m;
  const int p = mesh.order;
  const int np = p + 1;
  const int K = mesh.elements;
  const int n_unknown = K * np * m;
  const Eigen::MatrixXd D_ref = lobatto_diff_matrix(p);

  auto uidx = [&](int e, int j, int i) { return (e * np + j) * m + i; };

  SpectralSolution sol = guess;
  Eigen::VectorXd y(m), f(m), r;
  Eigen::MatrixXd J(m, m), Jb;

  auto residual = [&](const SpectralSolution& s, Eigen::VectorXd& R,
                      std::vector<Eigen::Triplet<double>>* trip) {
    R.setZero(n_unknown);
    int row = 0;
    for (int e = 0; e < K; ++e) {
      const double scale = 2.0 / mesh.width(e);
      for (int j = 1; j <= p; ++j) {
        for (int i = 0; i < m; ++i) y[i] = s.value(e, j, i);
        sys.rhs(s.node(e, j), y, f, J);
        for (int i = 0; i < m; ++i) {
          double d = 0.0;
          for (int l = 0; l <= p; ++l) {
            d += scale * D_ref(j, l) * s.value(e, l, i);
            if (trip) trip->emplace_back(row + i, uidx(e, l, i), scale * D_ref(j, l));
          }
          R[row + i] = d - f[i];
          if (trip)
            for (int k = 0; k < m; ++k)
              if (J(i, k) != 0.0) trip->emplace_back(row + i, uidx(e, j, k), -J(i, k));
        }
        row += m;
      }
      if (e > 0) {
        for (int i = 0; i < m; ++i) {
          R[row + i] = s.value(e, 0, i) - s.value(e - 1, p, i);
          if (trip) {
            trip->emplace_back(row + i, uidx(e, 0, i), 1.0);
            trip->emplace_back(row + i, uidx(e - 1, p, i), -1.0);
          }
        }
        row += m;
      }
    }
    for (int i = 0; i < m; ++i) y[i] = s.value(0, 0, i);
    sys.bc_left(y, r, Jb);
    for (int q = 0; q < sys.n_left; ++q) {
      R[row + q] = r[q];
      if (trip)
        for (int k = 0; k < m; ++k)
          if (Jb(q, k) != 0.0) trip->emplace_back(row + q, uidx(0, 0, k), Jb(q, k));
    }
    row += sys.n_left;
    for (int i = 0; i < m; ++i) y[i] = s.value(K - 1, p, i);
    sys.bc_right(y, r, Jb);
    for (int q = 0; q < m - sys.n_left; ++q) {
      R[row + q] = r[q];
      if (trip)
        for (int k = 0; k < m; ++k)
          if (Jb(q, k) != 0.0) trip->emplace_back(row + q, uidx(K - 1, p, k), Jb(q, k));
    }
  };

  auto apply_update = [&](SpectralSolution& s, const Eigen::VectorXd& dx, double lam) {
    for (int e = 0; e < K; ++e)
      for (int j = 0; j <= p; ++j)
        for (int i = 0; i < m; ++i) s.value(e, j, i) += lam * dx[uidx(e, j, i)];
  };

  Eigen::VectorXd R;
  std::vector<Eigen::Triplet<double>> trip;
  double last_update = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    trip.clear();
    residual(sol, R, &trip);
    const double rnorm = R.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(rnorm)) throw ConvergenceError("solve_bvp: non-finite collocation residual");
    Eigen::SparseMatrix<double> A(n_unknown, n_unknown);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SingularJacobianError("solve_bvp: singular collocation Jacobian");
    const Eigen::VectorXd dx = lu.solve(-R);
    if (!dx.allFinite()) throw SingularJacobianError("solve_bvp: non-finite Newton update");

    const double full_update = dx.lpNorm<Eigen::Infinity>() / std::max(1.0, sol.data().lpNorm<Eigen::Infinity>());
    if (full_update <= opts.tol) {
      // Below tolerance the residual is at rounding level; take the step.
      apply_update(sol, dx, 1.0);
      residual(sol, R, nullptr);
      if (report) *report = {it + 1, full_update, R.lpNorm<Eigen::Infinity>()};
      return sol;
    }
    double lam = 1.0;
    SpectralSolution trial = sol;
    Eigen::VectorXd Rt;
    for (int ls = 0; ls < 20; ++ls) {
      trial = sol;
      apply_update(trial, dx, lam);
      residual(trial, Rt, nullptr);
      const double tn = Rt.lpNorm<Eigen::Infinity>();
      if (std::isfinite(tn) && (tn < rnorm || lam < 1e-3)) break;
      lam *= 0.5;
    }
    sol = std::move(trial);
    const double ymax = std::max(1.0, sol.data().lpNorm<Eigen::Infinity>());
    last_update = lam * dx.lpNorm<Eigen::Infinity>() / ymax;
    if (lam == 1.0 && last_update <= opts.tol) {
      residual(sol, R, nullptr);
      if (report) *report = {it + 1, last_update, R.lpNorm<Eigen::Infinity>()};
      return sol;
    }
  }
  char msg[96];
  std::snprintf(msg, sizeof msg, "solve_bvp: Newton did not converge (last relative update %.3e)", last_update);
  throw ConvergenceError(msg);
}

}  // namespace critasym
