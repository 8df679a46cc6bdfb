#include "critasym/core/sech_series.hpp"

#include <cmath>

#include "critasym/errors.hpp"

namespace critasym {

double sech2(double x) {
  const double a = std::abs(x);
  if (a > 350.0) return 0.0;
  const double e = std::exp(-2.0 * a);
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

double sech2_series(double log_n, const std::function<double(int)>& c2, const std::function<double(int)>& c3,
                    int* terms_used, int extra_terms) {
  constexpr int kMaxTerms = 100000;
  double sum = 0.0;
  double prev_abs = -1.0;
  int k = 0;
  int extra = -1;
  for (; k < kMaxTerms; ++k) {
    const double X = -c2(k) * log_n + c3(k);
    if (!std::isfinite(X)) throw DomainError("sech2_series: non-finite X_k");
    const double term = sech2(X);
    sum += term;
    if (extra >= 0) {
      if (++extra > extra_terms) break;
      continue;
    }
    if (term < 1e-16 && prev_abs >= 0.0 && std::abs(X) >= prev_abs) {
      if (extra_terms == 0) break;
      extra = 0;
    }
    prev_abs = std::abs(X);
  }
  if (k == kMaxTerms) throw AccuracyError("sech2_series: no decay within the term limit");
  if (terms_used) *terms_used = k + 1;
  return sum;
}

}  // namespace critasym
