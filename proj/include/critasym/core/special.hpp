#pragma once

#include <complex>

namespace critasym {

/// Airy function Ai(s).
double airy(double s);
/// Derivative Ai'(s).
double airy_prime(double s);

struct EllipticKE {
  double K;
  double E;
};

/// Complete elliptic integrals of the first and second kind for modulus s,
/// computed with the arithmetic-geometric mean. Throws DomainError for s >= 1.
EllipticKE complete_elliptic(double s);

/// Jacobi theta function with unit period in z,
///   theta(z; tau) = sum_n exp(i pi n^2 tau + 2 i pi n z),
/// for purely imaginary tau = i * tau_imag, tau_imag > 0. The series is cut
/// once the remaining tail is below 1e-17 relative to the leading term.
double theta3(double z, double tau_imag);

/// theta3 and its first two z-derivatives, summed term by term.
struct ThetaDerivs {
  double value;
  double d1;
  double d2;
};
ThetaDerivs theta3_derivs(double z, double tau_imag);

/// Complex-argument evaluation, used for checking the half-period zero.
std::complex<double> theta3(std::complex<double> z, double tau_imag);

/// Number of terms n >= 1 kept on each side of the theta series.
int theta3_terms(double tau_imag);

}  // namespace critasym
