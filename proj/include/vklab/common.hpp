#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vklab {

// Nonnegative scalar that may be genuinely infinite (divergent moment,
// inapplicable bound).  The flag is explicit so that an IEEE infinity never
// leaks silently into downstream arithmetic.
class ExtendedReal {
 public:
  ExtendedReal() = default;

  static ExtendedReal finite(double v) {
    ExtendedReal e;
    e.value_ = v;
    return e;
  }
  static ExtendedReal infinity() {
    ExtendedReal e;
    e.infinite_ = true;
    return e;
  }

  bool is_finite() const { return !infinite_; }
  bool is_infinite() const { return infinite_; }

  double value() const {
    if (infinite_)
      throw std::logic_error("ExtendedReal: value() requested on an infinite quantity");
    return value_;
  }
  double value_or_inf() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

struct NonIntegrableError : std::domain_error {
  using std::domain_error::domain_error;
};

struct BoundInapplicableError : std::domain_error {
  using std::domain_error::domain_error;
};

struct WrongSchemeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature that did not reach its tolerance; carries the partial estimate.
struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double partial_, double error_)
      : std::runtime_error(what), partial(partial_), error_estimate(error_) {}
  double partial;
  double error_estimate;
};

struct PathDivergedError : std::runtime_error {
  PathDivergedError(std::size_t step_, double value_)
      : std::runtime_error("simulated path diverged at step " + std::to_string(step_)),
        step(step_),
        value(value_) {}
  std::size_t step;
  double value;
};

// Compensated (Kahan) accumulator.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Order-insensitive enough for deterministic reductions: the split points
// depend only on the length, never on thread scheduling.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need at least two matched points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (lo <= 0 || hi <= lo || n < 2)
    throw std::invalid_argument("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace vklab
