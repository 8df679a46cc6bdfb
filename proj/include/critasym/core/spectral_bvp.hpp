#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace critasym {

/// First-order system y' = f(x, y) with m components and separated boundary
/// conditions (n_left at x = a, m - n_left at x = b).
struct BvpSystem {
  int m = 0;
  int n_left = 0;
  // f and its Jacobian df/dy (m x m).
  std::function<void(double x, const Eigen::VectorXd& y, Eigen::VectorXd& f, Eigen::MatrixXd& J)> rhs;
  // Boundary residuals and their Jacobians (rows x m).
  std::function<void(const Eigen::VectorXd& y, Eigen::VectorXd& r, Eigen::MatrixXd& J)> bc_left;
  std::function<void(const Eigen::VectorXd& y, Eigen::VectorXd& r, Eigen::MatrixXd& J)> bc_right;
};

/// Partition of [a, b] into `elements` cells, each carrying
/// Chebyshev-Lobatto nodes of polynomial degree `order`. Cells are uniform
/// unless `breaks` (ascending, elements + 1 entries from a to b) is given.
struct SpectralMesh {
  double a = -1.0;
  double b = 1.0;
  int elements = 1;
  int order = 16;
  std::vector<double> breaks;

  double left(int e) const { return breaks.empty() ? a + e * (b - a) / elements : breaks[e]; }
  double right(int e) const { return e + 1 == elements ? b : left(e + 1); }
  double width(int e) const { return right(e) - left(e); }
  int nodes_per_element() const { return order + 1; }

  /// Mesh through the given ascending breakpoints.
  static SpectralMesh graded(std::vector<double> breaks, int order);
};

/// Piecewise-polynomial collocation solution. Values are stored per element
/// (interface nodes appear twice and agree to solver tolerance).
class SpectralSolution {
 public:
  SpectralSolution() = default;
  SpectralSolution(SpectralMesh mesh, int m);

  const SpectralMesh& mesh() const { return mesh_; }
  int components() const { return m_; }

  /// Node abscissa for element e, local index j.
  double node(int e, int j) const;
  double& value(int e, int j, int comp) { return data_(index(e, j), comp); }
  double value(int e, int j, int comp) const { return data_(index(e, j), comp); }

  /// Barycentric evaluation of component `comp` (or its x-derivative) at x.
  double eval(double x, int comp) const;
  double eval_derivative(double x, int comp) const;

  /// Distinct nodes in ascending order with the matching component values.
  std::vector<double> unique_nodes() const;
  std::vector<double> unique_values(int comp) const;

  Eigen::MatrixXd& data() { return data_; }
  const Eigen::MatrixXd& data() const { return data_; }

 private:
  int index(int e, int j) const { return e * mesh_.nodes_per_element() + j; }
  int element_of(double x) const;

  SpectralMesh mesh_;
  int m_ = 0;
  Eigen::MatrixXd data_;  // (elements * (order+1)) x m
};

struct BvpOptions {
  double tol = 1e-11;  // max-norm of the Newton update, relative to max(1, |y|)
  int max_iter = 40;
};

struct BvpReport {
  int iterations = 0;
  double last_update = 0.0;
  double collocation_residual = 0.0;
};

/// Damped Newton on the collocation equations, starting from `guess`.
/// Throws ConvergenceError when the update does not fall below tol.
SpectralSolution solve_bvp(const BvpSystem& sys, const SpectralSolution& guess,
                           const BvpOptions& opts = {}, BvpReport* report = nullptr);

/// Chebyshev-Lobatto nodes on [-1,1] (ascending) and the matching
/// differentiation matrix.
std::vector<double> lobatto_nodes(int order);
Eigen::MatrixXd lobatto_diff_matrix(int order);

}  // namespace critasym
