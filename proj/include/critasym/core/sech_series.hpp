#pragma once

#include <functional>

namespace critasym {

/// Sum over k >= 0 of sech^2(X_k) with X_k = -c2(k) log_n + c3(k).
/// Terms are added until one falls below 1e-16 while |X_k| is growing;
/// `terms_used` (optional) receives the number of terms summed.
double sech2_series(double log_n, const std::function<double(int)>& c2, const std::function<double(int)>& c3,
                    int* terms_used = nullptr, int extra_terms = 0);

/// sech^2 evaluated without overflow.
double sech2(double x);

}  // namespace critasym
