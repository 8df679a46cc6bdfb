#pragma once

#include <initializer_list>
#include <vector>

namespace critasym {

/// Real polynomial with coefficients in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  double coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : 0.0; }

  double operator()(double s) const;
  Polynomial derivative() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double a) const;

 private:
  void trim();
  std::vector<double> c_;
};

/// Sorted real roots of p, from the eigenvalues of its companion matrix.
std::vector<double> real_roots(const Polynomial& p);

}  // namespace critasym
