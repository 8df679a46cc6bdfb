#include "critasym/core/special.hpp"

#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <numbers>

#include "critasym/errors.hpp"

namespace critasym {

double airy(double s) { return boost::math::airy_ai(s); }

double airy_prime(double s) { return boost::math::airy_ai_prime(s); }

EllipticKE complete_elliptic(double s) {
  if (!(s >= 0.0) || s >= 1.0) {
    throw DomainError("complete_elliptic: modulus must lie in [0,1), got " + std::to_string(s));
  }
  // AGM(1, s') with the running sum of c_n^2 2^(n-1) for E.
  double a = 1.0;
  double b = std::sqrt((1.0 - s) * (1.0 + s));
  double c = s;
  double sum = 0.5 * c * c;
  double pow2 = 0.5;
  for (int it = 0; it < 64; ++it) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    c = 0.5 * (a - b);
    pow2 *= 2.0;
    sum += pow2 * c * c;
    a = an;
    b = bn;
    if (std::abs(c) <= 1e-17 * a) break;
  }
  const double K = std::numbers::pi / (2.0 * a);
  return {K, K * (1.0 - sum)};
}

int theta3_terms(double tau_imag) {
  if (!(tau_imag > 0.0)) {
    throw DomainError("theta3: Im(tau) must be positive");
  }
  // exp(-pi n^2 Im tau) < 1e-17 (times a polynomial factor for derivatives).
  const double nmax = std::sqrt(40.0 * std::log(10.0) / (std::numbers::pi * tau_imag));
  return static_cast<int>(std::ceil(nmax)) + 1;
}

double theta3(double z, double tau_imag) { return theta3_derivs(z, tau_imag).value; }

ThetaDerivs theta3_derivs(double z, double tau_imag) {
  const int nmax = theta3_terms(tau_imag);
  const double two_pi = 2.0 * std::numbers::pi;
  double v = 1.0;
  double d1 = 0.0;
  double d2 = 0.0;
  // Sum from the smallest terms up.
  for (int n = nmax; n >= 1; --n) {
    const double w = 2.0 * std::exp(-std::numbers::pi * n * n * tau_imag);
    const double k = two_pi * n;
    const double c = std::cos(k * z);
    const double sn = std::sin(k * z);
    v += w * c;
    d1 -= w * k * sn;
    d2 -= w * k * k * c;
  }
  return {v, d1, d2};
}

std::complex<double> theta3(std::complex<double> z, double tau_imag) {
  const int nmax =
      theta3_terms(tau_imag) + static_cast<int>(std::ceil(2.0 * std::abs(z.imag()) / tau_imag));
  const std::complex<double> i(0.0, 1.0);
  std::complex<double> sum = 0.0;
  for (int n = -nmax; n <= nmax; ++n) {
    sum += std::exp(-std::numbers::pi * n * n * tau_imag + 2.0 * std::numbers::pi * i * double(n) * z);
  }
  return sum;
}

}  // namespace critasym
