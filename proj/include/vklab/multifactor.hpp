#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vklab/kernel.hpp"

namespace vklab {

enum class NodeRule { left, midpoint, centroid };

// Finite-atomic approximation of a Bernstein measure on [0, N): uniform cells
// [u_{i-1}, u_i) with u_i = iN/n, weights w_i = mu([u_{i-1}, u_i)) and one
// node x_i per cell.  Empty cells are dropped.
struct MultifactorScheme {
  double truncation = 0.0;         // N
  std::size_t requested_factors = 0;  // n before empty cells were dropped
  NodeRule rule = NodeRule::centroid;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t factor_count() const { return nodes.size(); }
  double total_mass() const {
    KahanSum s;
    for (double w : weights) s.add(w);
    return s.value();
  }
};

inline MultifactorScheme discretize_measure(const BernsteinMeasure& mu, double truncation,
                                            std::size_t n, NodeRule rule = NodeRule::centroid,
                                            double rel_tol = 1e-9) {
  if (!(truncation > 0.0)) throw std::domain_error("discretize_measure: N must be > 0");
  if (n < 1) throw std::domain_error("discretize_measure: n must be >= 1");

  MultifactorScheme scheme;
  scheme.truncation = truncation;
  scheme.requested_factors = n;
  scheme.rule = rule;

  const double cell = truncation / static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double u_lo = cell * static_cast<double>(i - 1);
    const double u_hi = std::min(cell * static_cast<double>(i), truncation);
    const double w = mu.mass(u_lo, u_hi, rel_tol);
    if (!(w > 0.0)) continue;  // empty cell
    double node = 0.0;
    switch (rule) {
      case NodeRule::left:
        node = u_lo;
        break;
      case NodeRule::midpoint:
        node = 0.5 * (u_lo + u_hi);
        break;
      case NodeRule::centroid: {
        const ExtendedReal m1 = mu.moment(1.0, u_lo, u_hi, rel_tol);
        node = m1.value() / w;
        // quadrature jitter must not push the node outside its cell
        node = std::clamp(node, u_lo, std::nextafter(u_hi, u_lo));
        break;
      }
    }
    scheme.nodes.push_back(node);
    scheme.weights.push_back(w);
  }
  if (scheme.nodes.empty())
    throw std::domain_error("discretize_measure: measure has no mass on [0, N)");
  return scheme;
}

// K_hat(t) = sum_i w_i e^{-x_i t}.
inline Kernel multifactor_kernel(const MultifactorScheme& scheme) {
  return Kernel::finite_atomic(scheme.nodes, scheme.weights);
}

// \int_N^inf x^{-1/gamma} mu(dx): tail truncation term of the multifactor
// error estimate.  Infinite when the tail moment diverges.
inline ExtendedReal truncation_error_bound(const BernsteinMeasure& mu, double truncation,
                                           double gamma_exp) {
  if (!(gamma_exp > 2.0)) throw std::domain_error("truncation_error_bound: gamma must be > 2");
  if (!(truncation > 0.0)) throw std::domain_error("truncation_error_bound: N must be > 0");
  return mu.moment(-1.0 / gamma_exp, truncation, std::numeric_limits<double>::infinity());
}

// Closed-form tail rate for measures with mu(dx) <= C x^{-H-1/2} dx:
//   \int_N^inf x^{-1/gamma} mu(dx) <= C N^{delta-H}/(H-delta), gamma = 2/(1-2 delta).
inline double truncation_error_power_law(double c_mu, double hurst, double delta,
                                         double truncation) {
  if (!(delta > 0.0 && delta < hurst))
    throw std::domain_error("truncation_error_power_law: need 0 < delta < H");
  return c_mu * std::pow(truncation, delta - hurst) / (hurst - delta);
}

// mu([0, N)) * N / n: node-displacement term of the multifactor error estimate.
inline double discretization_error_bound(const BernsteinMeasure& mu, double truncation,
                                         std::size_t n) {
  if (n < 1) throw std::domain_error("discretization_error_bound: n must be >= 1");
  return mu.mass(0.0, truncation) * truncation / static_cast<double>(n);
}

}  // namespace vklab
