#include "critasym/painleve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "critasym/core/special.hpp"
#include "critasym/errors.hpp"

namespace critasym {

namespace {

constexpr int kOrder = 16;
constexpr int kOrderPI2 = 24;

SpectralMesh make_mesh(double a, double b, int n_points) {
  SpectralMesh mesh;
  mesh.a = a;
  mesh.b = b;
  mesh.order = kOrder;
  mesh.elements = std::max(1, static_cast<int>(std::lround(static_cast<double>(n_points - 1) / kOrder)));
  return mesh;
}

// Most elements refine [-W, W], where the solution oscillates; the outer
// cells shrink towards +-L to resolve the boundary layer of the truncated
// asymptote.
SpectralMesh make_pi2_mesh(double L, int n_points) {
  const int total = std::max(8, static_cast<int>(std::lround(static_cast<double>(n_points - 1) / kOrderPI2)));
  const double W = std::min(16.0, 0.5 * L);
  const int outer = std::max(2, total / 6);
  const int inner = std::max(1, total - 2 * outer);
  std::vector<double> left;  // breakpoints in [-L, -W)
  const double layer = std::min(1.0, 0.25 * (L - W));
  left.push_back(-L);
  left.push_back(-L + 0.25 * layer);
  left.push_back(-L + 0.5 * layer);
  for (int i = 0; i < outer - 2; ++i) left.push_back(-L + layer + (L - W - layer) * i / (outer - 2));
  std::vector<double> breaks = left;
  for (int i = 0; i < inner; ++i) breaks.push_back(-W + 2.0 * W * i / inner);
  breaks.push_back(W);
  for (auto it = left.rbegin(); it != left.rend(); ++it) breaks.push_back(-*it);
  return SpectralMesh::graded(std::move(breaks), kOrderPI2);
}

// Fills components 1..m-1 by repeated spectral differentiation of component 0.
void differentiate_chain(SpectralSolution& s) {
  const SpectralMesh& mesh = s.mesh();
  const int np = mesh.nodes_per_element();
  const Eigen::MatrixXd D_ref = lobatto_diff_matrix(mesh.order);
  for (int c = 1; c < s.components(); ++c) {
    for (int e = 0; e < mesh.elements; ++e) {
      const Eigen::MatrixXd D = D_ref * (2.0 / mesh.width(e));
      Eigen::VectorXd v(np);
      for (int j = 0; j < np; ++j) v[j] = s.value(e, j, c - 1);
      const Eigen::VectorXd d = D * v;
      for (int j = 0; j < np; ++j) s.value(e, j, c) = d[j];
    }
  }
}

// Abscissae halfway between consecutive collocation nodes.
std::vector<double> off_grid_points(const SpectralSolution& s) {
  std::vector<double> out;
  const SpectralMesh& mesh = s.mesh();
  for (int e = 0; e < mesh.elements; ++e)
    for (int j = 0; j < mesh.order; ++j) out.push_back(0.5 * (s.node(e, j) + s.node(e, j + 1)));
  return out;
}

double pi2_equation(double X, double T, double U, double U1, double U2, double U4) {
  return X - T * U + U * U * U / 6.0 + (U1 * U1 + 2.0 * U * U2) / 24.0 + U4 / 240.0;
}

BvpSystem pi2_system(double T, double L) {
  BvpSystem sys;
  sys.m = 4;
  sys.n_left = 2;
  sys.rhs = [T](double X, const Eigen::VectorXd& y, Eigen::VectorXd& f, Eigen::MatrixXd& J) {
    f.resize(4);
    J.setZero(4, 4);
    f[0] = y[1];
    f[1] = y[2];
    f[2] = y[3];
    f[3] = 240.0 * (T * y[0] - X - y[0] * y[0] * y[0] / 6.0 - (y[1] * y[1] + 2.0 * y[0] * y[2]) / 24.0);
    J(0, 1) = 1.0;
    J(1, 2) = 1.0;
    J(2, 3) = 1.0;
    J(3, 0) = 240.0 * (T - 0.5 * y[0] * y[0] - y[2] / 12.0);
    J(3, 1) = -20.0 * y[1];
    J(3, 2) = -20.0 * y[0];
  };
  auto bc = [T](double X) {
    return [T, X](const Eigen::VectorXd& y, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
      r.resize(2);
      J.setZero(2, 4);
      r[0] = y[0] - pi2_asymptote(X, T);
      r[1] = y[1] - pi2_asymptote_prime(X, T);
      J(0, 0) = 1.0;
      J(1, 1) = 1.0;
    };
  };
  sys.bc_left = bc(-L);
  sys.bc_right = bc(L);
  return sys;
}

// Least-squares slope and intercept of log d against log |X|.
void fit_tail(PI2Solution& sol) {
  const double hi = std::min(45.0, sol.L - 5.0);
  std::vector<double> lx, ld;
  for (double X = 5.0; X <= hi + 1e-12; X += 1.0) {
    for (double s : {-1.0, 1.0}) {
      const double d = std::abs(sol.raw.eval(s * X, 0) - pi2_asymptote(s * X, sol.T));
      if (d > 0.0) {
        lx.push_back(std::log(X));
        ld.push_back(std::log(d));
      }
    }
  }
  const double n = static_cast<double>(lx.size());
  if (n < 2) return;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ld[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ld[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  sol.tail_exponent = slope;
  sol.tail_C = std::exp((sy - slope * sx) / n);
}

}  // namespace

double pi2_asymptote(double X, double T) {
  if (X == 0.0) return 0.0;
  const double a = std::abs(X);
  const double sgn = X > 0 ? 1.0 : -1.0;
  return -sgn * (std::cbrt(6.0 * a) + std::cbrt(36.0) / 3.0 * T / std::cbrt(a));
}

double pi2_asymptote_prime(double X, double T) {
  if (X == 0.0) throw DomainError("pi2_asymptote_prime: X = 0");
  const double a = std::abs(X);
  // Odd in X, so the derivative is even.
  return -2.0 / std::cbrt(36.0 * a * a) + std::cbrt(36.0) / 9.0 * T / (a * std::cbrt(a));
}

PI2Solution solve_pi2(double T, double L, int n_points, const PI2Solution* guess) {
  if (n_points < 200) throw DomainError("solve_pi2: n_points must be >= 200");
  const double lead = std::cbrt(6.0 * L);
  const double corr = std::abs(std::cbrt(36.0) / 3.0 * T / std::cbrt(L));
  if (!(corr < 0.05 * lead)) throw DomainError("solve_pi2: L too small for the two-term boundary expansion");

  const SpectralMesh mesh = make_pi2_mesh(L, n_points);
  SpectralSolution init(mesh, 4);
  if (guess && guess->raw.mesh().breaks == mesh.breaks && guess->raw.mesh().order == mesh.order) {
    init = guess->raw;
  } else {
    for (int e = 0; e < mesh.elements; ++e)
      for (int j = 0; j <= mesh.order; ++j) {
        const double X = init.node(e, j);
        init.value(e, j, 0) = -6.0 * X / std::cbrt(36.0 * X * X + 1.0);
      }
    differentiate_chain(init);
  }

  BvpOptions opts;
  opts.tol = 1e-10;
  opts.max_iter = 60;
  PI2Solution sol;
  try {
    sol.raw = solve_bvp(pi2_system(T, L), init, opts);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("solve_pi2: Newton diverged (") + e.what() +
                           "); continue in T from T = 0 with solve_pi2_continued");
  }
  sol.T = T;
  sol.L = L;
  sol.X_grid = sol.raw.unique_nodes();
  sol.U = sol.raw.unique_values(0);
  sol.U1 = sol.raw.unique_values(1);
  sol.U2 = sol.raw.unique_values(2);
  sol.U3 = sol.raw.unique_values(3);
  sol.U4.resize(sol.U.size());
  for (std::size_t i = 0; i < sol.U.size(); ++i) {
    const double U = sol.U[i];
    sol.U4[i] = 240.0 * (T * U - sol.X_grid[i] - U * U * U / 6.0 - (sol.U1[i] * sol.U1[i] + 2.0 * U * sol.U2[i]) / 24.0);
  }

  double res = 0.0;
  for (double X : off_grid_points(sol.raw)) {
    const double U = sol.raw.eval(X, 0);
    const double U1 = sol.raw.eval(X, 1);
    const double U2 = sol.raw.eval(X, 2);
    const double U4 = sol.raw.eval_derivative(X, 3);
    res = std::max(res, std::abs(pi2_equation(X, T, U, U1, U2, U4)));
    for (int c = 0; c < 3; ++c)
      res = std::max(res, std::abs(sol.raw.eval_derivative(X, c) - sol.raw.eval(X, c + 1)));
  }
  sol.residual_norm = res;
  for (double v : sol.U)
    if (!std::isfinite(v)) throw ConvergenceError("solve_pi2: non-finite solution");
  if (res > 1e-6) throw AccuracyError("solve_pi2: residual " + std::to_string(res) + " above tolerance");
  fit_tail(sol);
  return sol;
}

PI2Solution solve_pi2_continued(double T, double L, int n_points) {
  PI2Solution sol = solve_pi2(0.0, L, n_points);
  const int steps = static_cast<int>(std::ceil(std::abs(T) / 0.25));
  for (int i = 1; i <= steps; ++i) {
    const double Ti = i == steps ? T : T * i / steps;
    sol = solve_pi2(Ti, L, n_points, &sol);
  }
  return sol;
}

std::shared_ptr<const PI2Solution> PI2Cache::get(double T) {
  std::lock_guard<std::mutex> lock(mu_);
  if (auto it = store_.find(T); it != store_.end()) return it->second;
  std::shared_ptr<const PI2Solution> start;
  if (store_.empty()) {
    start = std::make_shared<const PI2Solution>(solve_pi2(0.0, L_, n_points_));
    store_.emplace(0.0, start);
  } else {
    // Nearest stored T; ties go to the smaller key for determinism.
    auto hi = store_.lower_bound(T);
    if (hi == store_.end()) {
      start = std::prev(hi)->second;
    } else if (hi == store_.begin()) {
      start = hi->second;
    } else {
      auto lo = std::prev(hi);
      start = (T - lo->first <= hi->first - T) ? lo->second : hi->second;
    }
  }
  PI2Solution cur = *start;
  const double T0 = cur.T;
  const int steps = static_cast<int>(std::ceil(std::abs(T - T0) / 0.25));
  for (int i = 1; i <= steps; ++i) cur = solve_pi2(i == steps ? T : T0 + (T - T0) * i / steps, L_, n_points_, &cur);
  auto sol = std::make_shared<const PI2Solution>(std::move(cur));
  store_.emplace(T, sol);
  return sol;
}

HMGrid solve_hastings_mcleod(double S, int n_points) {
  if (S < 8.0) throw DomainError("solve_hastings_mcleod: S must be >= 8");
  if (n_points < 400) throw DomainError("solve_hastings_mcleod: n_points must be >= 400");
  BvpSystem sys;
  sys.m = 2;
  sys.n_left = 1;
  sys.rhs = [](double s, const Eigen::VectorXd& y, Eigen::VectorXd& f, Eigen::MatrixXd& J) {
    f.resize(2);
    J.setZero(2, 2);
    f[0] = y[1];
    f[1] = s * y[0] + 2.0 * y[0] * y[0] * y[0];
    J(0, 1) = 1.0;
    J(1, 0) = s + 6.0 * y[0] * y[0];
  };
  const double qL = std::sqrt(S / 2.0);
  const double qR = airy(S);
  sys.bc_left = [qL](const Eigen::VectorXd& y, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
    r.resize(1);
    J.setZero(1, 2);
    r[0] = y[0] - qL;
    J(0, 0) = 1.0;
  };
  sys.bc_right = [qR](const Eigen::VectorXd& y, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
    r.resize(1);
    J.setZero(1, 2);
    r[0] = y[0] - qR;
    J(0, 0) = 1.0;
  };

  const SpectralMesh mesh = make_mesh(-S, S, n_points);
  SpectralSolution init(mesh, 2);
  for (int e = 0; e < mesh.elements; ++e)
    for (int j = 0; j <= mesh.order; ++j) {
      const double s = init.node(e, j);
      // Positive profile with both asymptotes.
      const double blend = 0.5 * (1.0 - std::tanh(s));
      init.value(e, j, 0) = blend * std::sqrt((std::hypot(s, 1.0) - s) / 4.0) + (1.0 - blend) * airy(s);
    }
  differentiate_chain(init);

  BvpOptions opts;
  opts.tol = 1e-13;
  HMGrid g;
  g.raw = solve_bvp(sys, init, opts);
  g.S = S;
  g.s_grid = g.raw.unique_nodes();
  g.q_values = g.raw.unique_values(0);
  const double qmin = *std::min_element(g.q_values.begin(), g.q_values.end());
  if (!(qmin > 0.0)) throw BranchError("solve_hastings_mcleod: converged to a non-positive branch");

  double res = 0.0;
  for (double s : off_grid_points(g.raw)) {
    const double q = g.raw.eval(s, 0);
    res = std::max(res, std::abs(g.raw.eval_derivative(s, 1) - s * q - 2.0 * q * q * q));
    res = std::max(res, std::abs(g.raw.eval_derivative(s, 0) - g.raw.eval(s, 1)));
  }
  g.residual_norm = res;
  return g;
}

Evaluated eval_pi2(const PI2Solution& sol, double X) {
  if (X < -sol.L || X > sol.L) return {pi2_asymptote(X, sol.T), true};
  return {sol.raw.eval(X, 0), false};
}

Evaluated eval_hm(const HMGrid& grid, double s) {
  if (s > grid.S) return {airy(s), true};
  if (s < -grid.S) return {std::sqrt(-s / 2.0), true};
  return {grid.raw.eval(s, 0), false};
}

namespace {

void write_columns(const std::string& path, const char* header, const std::vector<double>& a,
                   const std::vector<double>& b) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << header << "\n";
  char buf[64];
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.16e,%.16e", a[i], b[i]);
    out << buf << "\n";
  }
}

}  // namespace

void write_pi2_csv(const PI2Solution& sol, const std::string& path) { write_columns(path, "X,U", sol.X_grid, sol.U); }

void write_hm_csv(const HMGrid& grid, const std::string& path) { write_columns(path, "s,q", grid.s_grid, grid.q_values); }

}  // namespace critasym
