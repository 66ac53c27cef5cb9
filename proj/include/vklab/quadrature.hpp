#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "vklab/common.hpp"

namespace vklab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  std::size_t evaluations = 0;
  bool converged = true;
};

namespace quad_detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1] (QUADPACK dqk15).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double* value, double* error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  *value = resk * h;
  *error = std::abs((resk - resg) * h);
}

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace quad_detail

// Globally adaptive Gauss-Kronrod integration on a finite interval: the
// segment with the worst error estimate is bisected until the summed error
// meets the tolerance or the interval budget runs out.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol = 0.0,
                     double rel_tol = 1e-10, std::size_t max_intervals = 4000) {
  QuadResult out;
  if (!(b > a)) return out;

  std::priority_queue<quad_detail::Segment> heap;
  quad_detail::Segment s{a, b, 0.0, 0.0};
  quad_detail::gk15(f, a, b, &s.value, &s.error);
  out.evaluations = 15;
  double total = s.value;
  double total_err = s.error;
  heap.push(s);

  auto tolerance = [&] { return std::max(abs_tol, rel_tol * std::abs(total)); };

  std::size_t n_segments = 1;
  while (total_err > tolerance() && n_segments < max_intervals) {
    quad_detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval no longer splittable at double precision
      heap.push(worst);
      break;
    }
    quad_detail::Segment left{worst.a, mid, 0.0, 0.0};
    quad_detail::Segment right{mid, worst.b, 0.0, 0.0};
    quad_detail::gk15(f, left.a, left.b, &left.value, &left.error);
    quad_detail::gk15(f, right.a, right.b, &right.value, &right.error);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n_segments;
  }

  out.value = total;
  out.error = total_err;
  out.converged = total_err <= std::max(tolerance(), 1e-300);
  return out;
}

// ∫_a^b g(x) dx where g(a + u) ~ C u^{-s} as u -> 0+ with s in (0, 1).
// The substitution u = y^{1/(1-s)} removes the endpoint singularity exactly:
//   ∫ g(a+u) du = (1/(1-s)) ∫ g(a + y^{1/(1-s)}) y^{s/(1-s)} dy,
// and the caller supplies regular(u) = g(a+u) * u^s, which is bounded, so the
// transformed integrand regular(u)/(1-s) never touches an infinity.
template <class Regular>
QuadResult integrate_singular_left(Regular&& regular, double a, double b, double s,
                                   double abs_tol = 0.0, double rel_tol = 1e-10,
                                   std::size_t max_intervals = 4000) {
  if (!(b > a)) return {};
  if (s >= 1.0)
    throw NonIntegrableError("integrate_singular_left: endpoint exponent >= 1");
  const double q = 1.0 - s;
  const double ymax = std::pow(b - a, q);
  auto g = [&](double y) {
    const double u = std::pow(y, 1.0 / q);
    return regular(u) / q;
  };
  return integrate(g, 0.0, ymax, abs_tol, rel_tol, max_intervals);
}

}  // namespace vklab
