#include "critasym/kdv_direct.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "critasym/errors.hpp"

namespace critasym {

namespace {

using cplx = std::complex<double>;
using Spectrum = std::vector<cplx>;

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Real <-> half-complex transform pair owning its aligned buffers.
class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(inv_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  double* real() { return real_; }
  cplx* spec() { return reinterpret_cast<cplx*>(spec_); }
  void forward() { fftw_execute(fwd_); }
  // Unnormalised: returns n times the samples.
  void inverse() { fftw_execute(inv_); }

 private:
  int n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

Spectrum spectrum_of(const std::vector<double>& u) {
  RealFft fft(static_cast<int>(u.size()));
  std::copy(u.begin(), u.end(), fft.real());
  fft.forward();
  return Spectrum(fft.spec(), fft.spec() + u.size() / 2 + 1);
}

struct Diagnostics {
  double mass;
  double l2;
};

Diagnostics diagnostics(const std::vector<double>& u, double dx) {
  Diagnostics d{0.0, 0.0};
  for (double v : u) {
    d.mass += v;
    d.l2 += v * v;
  }
  d.mass *= dx;
  d.l2 *= dx;
  return d;
}

double relative_drift(double now, double start) {
  const double diff = std::abs(now - start);
  return diff == 0.0 ? 0.0 : diff / std::max(std::abs(start), 1e-300);
}

}  // namespace

KdVField solve_kdv(const RealFn& u0, double eps, double t_final, double P, int m, const KdVOptions& opt) {
  if (!(eps > 0.0)) throw DomainError("solve_kdv: eps must be positive");
  if (!(t_final >= 0.0)) throw DomainError("solve_kdv: t_final must be non-negative");
  if (!(P > 0.0)) throw DomainError("solve_kdv: P must be positive");
  if (m < 4 || m > 16) throw DomainError("solve_kdv: m must lie in [4, 16]");
  if (!(opt.tol > 0.0)) throw DomainError("solve_kdv: tol must be positive");
  if (!(std::abs(u0(-P)) < 1e-8 && std::abs(u0(P)) < 1e-8)) {
    throw DomainError("solve_kdv: |u0(+-P)| must be below 1e-8 for the periodic surrogate");
  }
  const int n = 1 << m;
  const double dx = 2.0 * P / n;
  if (!(dx < eps / 4.0)) {
    throw ResolutionError("solve_kdv: grid spacing " + std::to_string(dx) + " is not below eps/4; raise m");
  }

  KdVField f;
  f.P = P;
  f.m = m;
  f.eps = eps;
  f.t = t_final;
  f.x.resize(n);
  f.u.resize(n);
  for (int j = 0; j < n; ++j) {
    f.x[j] = -P + j * dx;
    f.u[j] = u0(f.x[j]);
  }
  const Diagnostics d0 = diagnostics(f.u, dx);
  double umax0 = 0.0;
  for (double v : f.u) umax0 = std::max(umax0, std::abs(v));

  const int nk = n / 2 + 1;
  const int cutoff = n / 3;  // modes above are dropped from the nonlinear term
  std::vector<double> k(nk), disp(nk);
  for (int j = 0; j < nk; ++j) {
    k[j] = j == n / 2 ? 0.0 : std::numbers::pi * j / P;
    const double kk = std::numbers::pi * j / P;
    disp[j] = eps * eps * kk * kk * kk;
  }

  // v = exp(-i eps^2 k^3 t) u_hat turns the linear part into the identity flow.
  Spectrum v = spectrum_of(f.u);
  RealFft fft(n);
  auto rhs = [&](const Spectrum& state, Spectrum& dvdt, double t) {
    cplx* s = fft.spec();
    for (int j = 0; j < nk; ++j) s[j] = state[j] * std::polar(1.0, disp[j] * t);
    fft.inverse();
    double* r = fft.real();
    const double scale = 1.0 / n;
    for (int j = 0; j < n; ++j) {
      const double u = r[j] * scale;
      r[j] = u * u;
    }
    fft.forward();
    for (int j = 0; j < nk; ++j) {
      dvdt[j] = j > cutoff ? cplx(0.0) : cplx(0.0, -3.0 * k[j]) * s[j] * std::polar(1.0, -disp[j] * t);
    }
  };

  double vmax0 = 0.0;
  for (const cplx& c : v) vmax0 = std::max(vmax0, std::abs(c));
  const double abs_tol = opt.tol * std::max(vmax0, 1e-300);
  const double limit = opt.blowup_factor * std::max(umax0, 1.0) * n;
  auto observer = [&](const Spectrum& state, double t) {
    double s = 0.0;
    for (const cplx& c : state) s += std::abs(c);
    if (!std::isfinite(s) || s > limit) {
      throw StabilityError("solve_kdv: solution blew up near t = " + std::to_string(t));
    }
  };

  namespace ode = boost::numeric::odeint;
  if (t_final > 0.0) {
    auto stepper = ode::make_controlled(abs_tol, opt.tol, ode::runge_kutta_dopri5<Spectrum>());
    // Initial step from the nonlinear CFL scale; the controller adapts it.
    const double dt0 = std::min(t_final, 0.1 * dx / (6.0 * std::max(umax0, 1e-3)));
    try {
      f.steps = static_cast<long>(ode::integrate_adaptive(stepper, rhs, v, 0.0, t_final, dt0, observer));
    } catch (const ode::odeint_error& e) {
      throw StabilityError(std::string("solve_kdv: step control failed: ") + e.what());
    }
  }

  // Back to physical space at t_final.
  cplx* s = fft.spec();
  for (int j = 0; j < nk; ++j) s[j] = v[j] * std::polar(1.0, disp[j] * t_final);
  double peak = 0.0, tail = 0.0;
  for (int j = 0; j < nk; ++j) {
    const double a = std::abs(s[j]);
    peak = std::max(peak, a);
    if (j >= n / 4 && j <= cutoff) tail = std::max(tail, a);
  }
  fft.inverse();
  for (int j = 0; j < n; ++j) f.u[j] = fft.real()[j] / n;

  f.spectral_tail = peak > 0.0 ? tail / peak : 0.0;
  const Diagnostics d1 = diagnostics(f.u, dx);
  f.mass_drift = relative_drift(d1.mass, d0.mass);
  f.l2_drift = relative_drift(d1.l2, d0.l2);
  for (int j = 0; j < n; ++j) {
    if (std::abs(f.x[j]) > 0.95 * P) f.edge_max = std::max(f.edge_max, std::abs(f.u[j]));
  }
  if (f.spectral_tail > opt.tail_limit) {
    throw ResolutionError("solve_kdv: spectral tail " + std::to_string(f.spectral_tail) +
                          " exceeds the limit; raise m");
  }
  return f;
}

KdVField solve_kdv(const InitialData& data, double eps, double t_final, double P, int m, const KdVOptions& opt) {
  return solve_kdv(data.u0, eps, t_final, P, m, opt);
}

std::vector<double> probe(const KdVField& field, const std::vector<double>& xs) {
  const int n = static_cast<int>(field.u.size());
  if (n < 2) throw DomainError("probe: empty field");
  const Spectrum c = spectrum_of(field.u);
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const double y = x + field.P;  // grid starts at -P
    double acc = c[0].real();
    for (int j = 1; j <= n / 2; ++j) {
      const double w = j == n / 2 ? 1.0 : 2.0;
      acc += w * (c[j] * std::polar(1.0, std::numbers::pi * j * y / field.P)).real();
    }
    out.push_back(acc / n);
  }
  return out;
}

double probe(const KdVField& field, double x) { return probe(field, std::vector<double>{x}).front(); }

double max_deviation(const KdVField& field, const RealFn& ref, double x_lo, double x_hi) {
  double err = 0.0;
  for (std::size_t j = 0; j < field.x.size(); ++j) {
    if (field.x[j] >= x_lo && field.x[j] <= x_hi) err = std::max(err, std::abs(field.u[j] - ref(field.x[j])));
  }
  return err;
}

}  // namespace critasym
