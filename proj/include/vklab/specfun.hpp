#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <quadmath.h>

#include "vklab/common.hpp"

namespace vklab {

namespace specfun_detail {

// Thread-safe log-gamma for positive arguments (std::lgamma writes the global
// signgam on glibc).
inline double lgamma_pos(double x) {
#ifdef __GLIBC__
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

inline long double lgamma_posl(long double x) {
#ifdef __GLIBC__
  int sign = 0;
  return ::lgammal_r(x, &sign);
#else
  return std::lgamma(static_cast<double>(x));
#endif
}

inline bool is_nonpositive_integer(double x) {
  if (x > 0.0) return false;
  const double n = std::round(x);
  return std::abs(x - n) <= 1e-13 * std::max(1.0, std::abs(n));
}

}  // namespace specfun_detail

inline double gamma_fn(double x) {
  if (specfun_detail::is_nonpositive_integer(x))
    throw std::domain_error("gamma_fn: pole at non-positive integer");
  return std::tgamma(x);
}

inline double log_gamma(double x) {
  if (x <= 0.0) throw std::domain_error("log_gamma: argument must be positive");
  return specfun_detail::lgamma_pos(x);
}

inline double beta_fn(double a, double b) {
  if (a <= 0.0 || b <= 0.0) throw std::domain_error("beta_fn: arguments must be positive");
  return std::exp(specfun_detail::lgamma_pos(a) + specfun_detail::lgamma_pos(b) -
                  specfun_detail::lgamma_pos(a + b));
}

namespace specfun_detail {

struct SignedLog {
  double log_abs;
  int sign;  // 0 marks a pole of Gamma, i.e. 1/Gamma = 0
};

// log |1/Gamma(x)| with sign, valid on the whole real line.
inline SignedLog log_rgamma(double x) {
  if (x > 0.0) return {-lgamma_pos(x), 1};
  if (is_nonpositive_integer(x)) return {0.0, 0};
  // reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
  const double m = std::floor(x);
  const double f = x - m;  // in (0, 1)
  const double sin_pf = std::sin(M_PI * f);
  const int sign = (static_cast<std::int64_t>(m) % 2 == 0) ? 1 : -1;
  const double log_abs = std::log(sin_pf) + lgamma_pos(1.0 - x) - std::log(M_PI);
  return {log_abs, sign};
}

inline double rgamma(double x) {
  const SignedLog sl = log_rgamma(x);
  if (sl.sign == 0) return 0.0;
  return sl.sign * std::exp(sl.log_abs);
}

}  // namespace specfun_detail

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
// series for x < a+1 and a continued fraction (modified Lentz) otherwise.
inline double lower_gamma_regularized(double a, double x) {
  if (a <= 0.0) throw std::domain_error("lower_gamma_regularized: a must be positive");
  if (x < 0.0) throw std::domain_error("lower_gamma_regularized: x must be nonnegative");
  if (x == 0.0) return 0.0;
  const double log_prefac = a * std::log(x) - x - specfun_detail::lgamma_pos(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return std::exp(log_prefac) * sum;
  }
  // Lentz continued fraction for Q(a, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(log_prefac) * h;
  return 1.0 - q;
}

inline double upper_gamma_regularized(double a, double x) {
  if (x < a + 1.0) return 1.0 - lower_gamma_regularized(a, x);
  const double log_prefac = a * std::log(x) - x - specfun_detail::lgamma_pos(a);
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(log_prefac) * h;
}

// Unnormalized lower incomplete gamma(a, x).
inline double lower_gamma(double a, double x) {
  return std::exp(specfun_detail::lgamma_pos(a)) * lower_gamma_regularized(a, x);
}

namespace ml_detail {

// The power series suffers catastrophic cancellation on the negative axis:
// the largest term is about exp(r^{1/alpha}) while the value is O(1).  Tiers
// of precision keep the absolute error near 1e-15 across the series regime.
inline double series_double(double alpha, double beta, double r) {
  double sum = 0.0, carry = 0.0;
  double prev = std::numeric_limits<double>::max();
  for (int n = 0; n < 400; ++n) {
    const double lg = specfun_detail::lgamma_pos(alpha * n + beta);
    double t = std::exp(n * std::log(r) - lg);
    if (n % 2 == 1) t = -t;
    const double y = t - carry;
    const double s = sum + y;
    carry = (s - sum) - y;
    sum = s;
    const double at = std::abs(t);
    if (n > 2 && at < prev && at < 1e-17 * std::max(1.0, std::abs(sum))) break;
    prev = at;
  }
  return sum;
}

inline double series_long_double(double alpha, double beta, double r) {
  long double sum = 0.0L;
  long double prev = std::numeric_limits<long double>::max();
  const long double lr = std::log(static_cast<long double>(r));
  for (int n = 0; n < 2000; ++n) {
    const long double lg =
        specfun_detail::lgamma_posl(static_cast<long double>(alpha) * n + beta);
    long double t = std::exp(n * lr - lg);
    if (n % 2 == 1) t = -t;
    sum += t;
    const long double at = std::abs(t);
    if (n > 2 && at < prev && at < 1e-21L * std::max(1.0L, std::abs(sum))) break;
    prev = at;
  }
  return static_cast<double>(sum);
}

inline double series_float128(double alpha, double beta, double r) {
  __float128 sum = 0;
  __float128 prev = 1e300;
  const __float128 lr = logq(static_cast<__float128>(r));
  for (int n = 0; n < 20000; ++n) {
    const __float128 lg = lgammaq(static_cast<__float128>(alpha) * n + beta);
    __float128 t = expq(static_cast<__float128>(n) * lr - lg);
    if (n % 2 == 1) t = -t;
    sum += t;
    const __float128 at = fabsq(t);
    __float128 scale = fabsq(sum);
    if (scale < 1) scale = 1;
    if (n > 2 && at < prev && at < scale * static_cast<__float128>(1e-36)) break;
    prev = at;
  }
  return static_cast<double>(sum);
}

// Asymptotic expansion on the negative real axis,
//   E_{a,b}(-r) ~ sum_{k>=1} (-1)^{k+1} r^{-k} / Gamma(b - a k),
// truncated at the smallest term.  Terms where Gamma hits a pole vanish.
// The truncation point is located on the smooth envelope
//   r^{-k} Gamma(1 + a k - b) / pi,
// because |1/Gamma(b - a k)| itself oscillates with |sin(pi(b - a k))| and
// its local dips near poles would stop the summation far too early.
inline double asymptotic(double alpha, double beta, double r) {
  const double lr = std::log(r);
  const double log_pi = std::log(M_PI);
  double sum = 0.0, carry = 0.0;
  double prev_env = std::numeric_limits<double>::max();
  for (int k = 1; k < 5000; ++k) {
    const double x = beta - alpha * k;
    // For x <= 1/2 the reflection form Gamma(1-x)/pi is smooth through the
    // poles of Gamma(x); the two branches agree at x = 1/2.
    const double log_env =
        -k * lr + (x > 0.5 ? -specfun_detail::lgamma_pos(x)
                           : specfun_detail::lgamma_pos(1.0 - x) - log_pi);
    if (k > 2 && x < 0.5 && log_env > prev_env) break;  // past the asymptotic floor
    prev_env = log_env;
    const specfun_detail::SignedLog sl = specfun_detail::log_rgamma(x);
    if (sl.sign != 0) {
      double t = sl.sign * std::exp(-k * lr + sl.log_abs);
      if (k % 2 == 0) t = -t;
      const double y = t - carry;
      const double s = sum + y;
      carry = (s - sum) - y;
      sum = s;
    }
    if (log_env < std::log(1e-18 * std::max(1.0, std::abs(sum)))) break;
  }
  return sum;
}

}  // namespace ml_detail

// Series/asymptotic crossover |z| for the Mittag-Leffler evaluator.  At
// r = 36^alpha both branches carry absolute error near 1e-14: the series
// cancellation peak exp(r^{1/alpha}) = e^36 stays within quad-precision
// headroom while the optimally truncated asymptotic error ~ e^{-r^{1/alpha}}.
inline double ml_series_switch(double alpha) { return std::pow(36.0, alpha); }

// Series branch with precision escalation (exposed for crossover tests).
inline double mittag_leffler_series(double alpha, double beta, double z) {
  const double r = -z;
  if (r == 0.0) return specfun_detail::rgamma(beta);
  const double w = std::pow(r, 1.0 / alpha);  // log of the cancellation peak
  if (w <= 2.0) return ml_detail::series_double(alpha, beta, r);
  if (w <= 8.0) return ml_detail::series_long_double(alpha, beta, r);
  return ml_detail::series_float128(alpha, beta, r);
}

inline double mittag_leffler_asymptotic(double alpha, double beta, double z) {
  return ml_detail::asymptotic(alpha, beta, -z);
}

// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for z <= 0,
// alpha in (0, 1], beta > 0.  For alpha = 1 the asymptotic branch degenerates
// (the value is exponentially small in r), so the series is used throughout;
// with beta != 1 accuracy is guaranteed for |z| <= 25.
inline double mittag_leffler(double alpha, double beta, double z) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::domain_error("mittag_leffler: alpha must lie in (0, 1]");
  if (!(beta > 0.0)) throw std::domain_error("mittag_leffler: beta must be positive");
  if (z > 0.0) throw std::domain_error("mittag_leffler: only z <= 0 is supported");
  const double r = -z;
  if (r == 0.0) return specfun_detail::rgamma(beta);
  if (alpha == 1.0 && beta == 1.0) return std::exp(z);
  if (alpha == 1.0) return mittag_leffler_series(alpha, beta, z);
  if (r <= ml_series_switch(alpha)) return mittag_leffler_series(alpha, beta, z);
  return mittag_leffler_asymptotic(alpha, beta, z);
}

}  // namespace vklab
