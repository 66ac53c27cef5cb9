#pragma once

// Independent reference implementations for cross-checking the library.
// These deliberately avoid the code paths they validate: plain composite
// Simpson instead of adaptive Gauss-Kronrod, a fixed-term long-double power
// series instead of the tiered Mittag-Leffler evaluator.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

// Composite Simpson with one Richardson refinement step.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n_half = 4096) {
  auto simp = [&](int n) {
    const double h = (b - a) / (2.0 * n);
    double s = f(a) + f(b);
    for (int i = 1; i < 2 * n; ++i) s += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  const double coarse = simp(n_half / 2);
  const double fine = simp(n_half);
  return fine + (fine - coarse) / 15.0;
}

// Fixed-term Mittag-Leffler power series in extended precision.
inline long double ml_series_200(double alpha, double beta, double z, int terms = 200) {
  long double sum = 0.0L;
  for (int n = 0; n < terms; ++n) {
    const long double lg = std::lgamma(static_cast<long double>(alpha) * n + beta);
    long double t = std::exp(n * std::log(std::abs(static_cast<long double>(z))) - lg);
    if (z < 0 && n % 2 == 1) t = -t;
    if (z == 0 && n > 0) t = 0.0L;
    sum += t;
  }
  return sum;
}

inline std::mt19937& test_rng() {
  static std::mt19937 rng(987654321u);
  return rng;
}

inline double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(test_rng());
}

inline int uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(test_rng());
}

}  // namespace oracles
