#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "vklab/kernel.hpp"
#include "vklab/specfun.hpp"

namespace vklab {

// b_p = 2 p^{p/2}, the martingale moment constant.
inline double bdg_constant_b(double p) {
  if (!(p >= 2.0)) throw std::domain_error("bdg_constant_b: p must be >= 2");
  return 2.0 * std::pow(p, 0.5 * p);
}

inline double log_bdg_constant_b(double p) {
  if (!(p >= 2.0)) throw std::domain_error("bdg_constant_b: p must be >= 2");
  return std::log(2.0) + 0.5 * p * std::log(p);
}

struct AlphaInterval {
  double lo;
  double hi;
  bool contains(double a) const { return a > lo && a < hi; }
};

// Admissible exponent interval ((p+gamma-1)/(p gamma), (p gamma-2)/(2 p gamma)),
// nonempty exactly when p > 2 gamma/(gamma - 2) (equivalently p gamma > 2p + 2 gamma).
inline AlphaInterval alpha_interval(double p, double gamma_exp) {
  if (!(gamma_exp > 2.0))
    throw std::domain_error("alpha_interval: gamma must exceed 2");
  if (!(p > 2.0 * gamma_exp / (gamma_exp - 2.0)))
    throw std::domain_error("alpha_interval: p must exceed 2*gamma/(gamma-2) = " +
                            std::to_string(2.0 * gamma_exp / (gamma_exp - 2.0)));
  return {(p + gamma_exp - 1.0) / (p * gamma_exp),
          (p * gamma_exp - 2.0) / (2.0 * p * gamma_exp)};
}

inline double log_c_alpha_p_gamma(double alpha, double p, double gamma_exp) {
  const AlphaInterval iv = alpha_interval(p, gamma_exp);
  if (!iv.contains(alpha))
    throw std::domain_error("c_alpha_p_gamma: alpha outside the admissible interval");
  // With a = (alpha-1) p/(p-1) gamma/(gamma-1) and b = -2 alpha p gamma/(p gamma - 2),
  //   C = (1/(a+1))^{(p-1)(gamma-1)/gamma} * (1/(b+1))^{(1 - 2/(p gamma)) p/2};
  // both a+1 and b+1 are positive on the open interval, and the T-powers
  // factor out as T^{p(1/2 - 1/gamma) - 1}.
  const double a = (alpha - 1.0) * (p / (p - 1.0)) * (gamma_exp / (gamma_exp - 1.0));
  const double b = -2.0 * alpha * (p * gamma_exp) / (p * gamma_exp - 2.0);
  const double e1 = (p - 1.0) * (gamma_exp - 1.0) / gamma_exp;
  const double e2 = (1.0 - 2.0 / (p * gamma_exp)) * 0.5 * p;
  return -e1 * std::log(a + 1.0) - e2 * std::log(b + 1.0);
}

inline double c_alpha_p_gamma(double alpha, double p, double gamma_exp) {
  return std::exp(log_c_alpha_p_gamma(alpha, p, gamma_exp));
}

struct CbarResult {
  double value;      // min over alpha of b_p C_{alpha,p,gamma}
  double log_value;
  double alpha_star;
};

// Tightest constant the admissible interval offers: golden-section search on
// log(b_p C_alpha) to 1e-8 in alpha, seeded by a coarse bracketing scan.
inline CbarResult cbar(double p, double gamma_exp) {
  const AlphaInterval iv = alpha_interval(p, gamma_exp);
  auto objective = [&](double a) { return log_bdg_constant_b(p) + log_c_alpha_p_gamma(a, p, gamma_exp); };

  const int scan = 128;
  const double width = iv.hi - iv.lo;
  double best = iv.lo + width * 0.5;
  double best_val = objective(best);
  for (int i = 1; i < scan; ++i) {
    const double a = iv.lo + width * i / scan;
    const double v = objective(a);
    if (v < best_val) {
      best_val = v;
      best = a;
    }
  }
  double lo = std::max(iv.lo + 1e-12 * width, best - width / scan);
  double hi = std::min(iv.hi - 1e-12 * width, best + width / scan);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > 1e-8) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = objective(x2);
    }
  }
  CbarResult r;
  r.alpha_star = 0.5 * (lo + hi);
  r.log_value = objective(r.alpha_star);
  r.value = std::exp(r.log_value);
  return r;
}

// Every constant entering the moment bounds, assembled for one evaluation.
struct BdgBoundReport {
  std::string kind;  // "finite_horizon" or "uniform"
  double p = 0.0;
  double gamma = 0.0;  // finite-horizon only
  double horizon = 0.0;
  int d = 1;
  int m = 1;
  double b_p = 0.0;
  double alpha = 0.0;          // minimizer (finite) or implied alpha (uniform)
  double c_alpha_p_gamma = 0.0;
  double cbar = 0.0;           // b_p * C_{alpha*,p,gamma}
  double kernel_norm = 0.0;    // ||K||_{L^gamma([0,T])}
  ExtendedReal m_p;            // uniform only
  double c_pdm = 0.0;          // uniform only
  double phi_pnorm = 0.0;      // \int E|phi|^p ds
  double rhs = 0.0;
  double log_rhs = 0.0;
};

// Finite-horizon bound
//   rhs = Cbar_{p,gamma} d^{(3p-4)/2} m^{p-1} T^{p(1/2-1/gamma)-1} ||K||^p phi_pnorm.
inline BdgBoundReport finite_horizon_bound(const Kernel& kernel, double p, double gamma_exp,
                                           double horizon, int d, int m,
                                           double phi_pnorm) {
  if (d < 1 || m < 1) throw std::domain_error("finite_horizon_bound: d, m must be >= 1");
  if (!(phi_pnorm >= 0.0))
    throw std::domain_error("finite_horizon_bound: phi_pnorm must be >= 0");
  const CbarResult cb = cbar(p, gamma_exp);
  BdgBoundReport r;
  r.kind = "finite_horizon";
  r.p = p;
  r.gamma = gamma_exp;
  r.horizon = horizon;
  r.d = d;
  r.m = m;
  r.b_p = bdg_constant_b(p);
  r.alpha = cb.alpha_star;
  r.c_alpha_p_gamma = c_alpha_p_gamma(cb.alpha_star, p, gamma_exp);
  r.cbar = cb.value;
  r.kernel_norm = kernel.lgamma_norm(gamma_exp, horizon);
  r.phi_pnorm = phi_pnorm;
  r.log_rhs = cb.log_value + 0.5 * (3.0 * p - 4.0) * std::log(static_cast<double>(d)) +
              (p - 1.0) * std::log(static_cast<double>(m)) +
              (p * (0.5 - 1.0 / gamma_exp) - 1.0) * std::log(horizon) +
              p * std::log(r.kernel_norm) + std::log(phi_pnorm);
  r.rhs = std::exp(r.log_rhs);
  return r;
}

// Uniform-in-time bound
//   rhs = C_{p,d,m} M_p^p phi_pnorm,
//   C_{p,d,m} = d^{(3p-4)/2} m^{p-1} b_p Gamma((p-2)/(2p^2))^{p/2} Gamma((p-2)/(2p))^{p-1},
// with phi_pnorm integrated over the whole half-line.  Requires p > 2 and a
// finite moment M_p; otherwise the bound is inapplicable.
inline BdgBoundReport uniform_bound(const Kernel& kernel, double p, int d, int m,
                                    double phi_pnorm) {
  if (!(p > 2.0))
    throw std::domain_error("uniform_bound: p must exceed 2 (Gamma arguments degenerate)");
  if (d < 1 || m < 1) throw std::domain_error("uniform_bound: d, m must be >= 1");
  const ExtendedReal mp = mp_condition(kernel, p);
  if (mp.is_infinite())
    throw BoundInapplicableError(
        "uniform_bound: M_p = int x^{(2-p)/(2p)} mu(dx) is infinite for this kernel "
        "(gamma/resolvent kernels need p > 1/H)");
  BdgBoundReport r;
  r.kind = "uniform";
  r.p = p;
  r.horizon = std::numeric_limits<double>::infinity();
  r.d = d;
  r.m = m;
  r.b_p = bdg_constant_b(p);
  r.alpha = (2.0 - p + p * p) / (2.0 * p * p);
  r.m_p = mp;
  const double log_c = 0.5 * (3.0 * p - 4.0) * std::log(static_cast<double>(d)) +
                       (p - 1.0) * std::log(static_cast<double>(m)) + log_bdg_constant_b(p) +
                       0.5 * p * log_gamma((p - 2.0) / (2.0 * p * p)) +
                       (p - 1.0) * log_gamma((p - 2.0) / (2.0 * p));
  r.c_pdm = std::exp(log_c);
  r.phi_pnorm = phi_pnorm;
  r.log_rhs = log_c + p * std::log(mp.value()) + std::log(phi_pnorm);
  r.rhs = std::exp(r.log_rhs);
  return r;
}

// Raw right-hand side of the intermediate estimate, for any alpha in (0, 1/2):
//   d^{(3p-4)/2} m^{p-1} b_p I1^{p-1} I2 phi_pnorm,
//   I1 = \int_0^T s^{(alpha-1)p/(p-1)} K(s) ds,
//   I2 = \int_0^inf (\int_0^T e^{-2xs} s^{-2alpha} ds)^{p/2} mu(dx),
// where the inner integral is (2x)^{2alpha-1} gamma(1-2alpha, 2xT), with the
// T = inf limit (2x)^{2alpha-1} Gamma(1-2alpha).  Returns the infinite tag
// when either integral diverges.
inline ExtendedReal lemma_rhs(const Kernel& kernel, double p, double alpha, double horizon,
                              double phi_pnorm, int d = 1, int m = 1) {
  if (!(p >= 2.0)) throw std::domain_error("lemma_rhs: p must be >= 2");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::domain_error("lemma_rhs: alpha must lie in (0, 1/2)");
  const double w1 = (alpha - 1.0) * p / (p - 1.0);  // in (-1, 0) iff integrable with K
  const double sigma0 = kernel.singularity_exponent();
  if (w1 - sigma0 <= -1.0 + 1e-12) return ExtendedReal::infinity();

  const bool infinite_horizon = !std::isfinite(horizon);

  // I1: kernel-side integral with the combined s^{w1 - sigma0} singularity
  // flattened at the origin.
  double i1 = 0.0;
  if (infinite_horizon) {
    // Fubini: I1 = Gamma((alpha p - 1)/(p - 1) + 1) ... expressed through the
    // measure: \int_0^inf s^{w1} e^{-xs} ds = Gamma(w1+1) x^{-w1-1}.
    const ExtendedReal mom = kernel.measure().moment(-w1 - 1.0, 0.0,
                                                     std::numeric_limits<double>::infinity());
    if (mom.is_infinite()) return ExtendedReal::infinity();
    i1 = gamma_fn(w1 + 1.0) * mom.value();
  } else {
    const double s_eff = sigma0 - w1;  // w1 < 0, so this exceeds sigma0
    auto regular = [&](double u) {
      if (u <= 0.0) return 0.0;
      return std::pow(u, s_eff + w1) * kernel.eval(u);
    };
    QuadResult q = integrate_singular_left(regular, 0.0, horizon, s_eff, 0.0, 1e-10);
    i1 = q.value;
  }

  // I2: measure-side integral with weight g(x)^{p/2},
  // g(x) = \int_0^T e^{-2xs} s^{-2alpha} ds.
  const double tail_pow = p * (alpha - 0.5);  // weight ~ (2x)^{tail_pow} Gamma(...)^{p/2}
  const double g_inf = gamma_fn(1.0 - 2.0 * alpha);
  std::function<double(double)> weight;
  if (infinite_horizon) {
    weight = [alpha, p, g_inf](double x) {
      return std::pow(std::pow(2.0 * x, 2.0 * alpha - 1.0) * g_inf, 0.5 * p);
    };
  } else {
    weight = [alpha, p, horizon](double x) {
      const double a = 1.0 - 2.0 * alpha;
      const double u = 2.0 * x * horizon;
      double g;
      if (u < 0.5) {
        // (2x)^{-a} gamma(a, u) = T^a sum_k (-u)^k / (k! (a+k)), stable as x -> 0
        double t = 1.0;
        double acc = 1.0 / a;
        for (int k = 1; k < 60; ++k) {
          t *= -u / static_cast<double>(k);
          acc += t / (a + k);
          if (std::abs(t) < 1e-18 * (a + k) * std::abs(acc)) break;
        }
        g = std::pow(horizon, a) * acc;
      } else {
        g = std::pow(2.0 * x, -a) * lower_gamma(a, u);
      }
      return std::pow(g, 0.5 * p);
    };
  }
  IntegrandWeight iw = IntegrandWeight::generic(weight, 0.0, tail_pow, 0.0);
  MeasureIntegral i2 = kernel.measure().integrate(iw, 0.0,
                                                  std::numeric_limits<double>::infinity());
  if (i2.value.is_infinite()) return ExtendedReal::infinity();

  const double value = std::pow(static_cast<double>(d), 0.5 * (3.0 * p - 4.0)) *
                       std::pow(static_cast<double>(m), p - 1.0) * bdg_constant_b(p) *
                       std::pow(i1, p - 1.0) * i2.value.value() * phi_pnorm;
  return ExtendedReal::finite(value);
}

}  // namespace vklab
