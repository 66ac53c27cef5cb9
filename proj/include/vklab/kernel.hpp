#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "vklab/measure.hpp"
#include "vklab/specfun.hpp"

namespace vklab {

// Completely monotone convolution kernel K(t) = c * \int e^{-xt} mu(dx),
// represented by a structural form (closed-form evaluation where one exists)
// paired with its Bernstein measure (quadrature evaluation always).  The two
// routes are kept independent so they can cross-check each other.
class Kernel {
 public:
  enum class Form {
    exponential,    // e^{-beta t},            mu = delta_beta
    power_law,      // t^{H-1/2},              mu = x^{-H-1/2}/Gamma(1/2-H) dx
    gamma,          // e^{-beta t} t^{H-1/2},  mu = translated power-law density
    ml_resolvent,   // lambda t^{H-1/2} E_{a,a}(-lambda t^a), a = H+1/2
    shifted,        // K_inner(t + eps),       mu = e^{-x eps} mu_inner
    damped,         // e^{-beta t} K_inner(t), mu = mu_inner translated by beta
    truncated,      // measure restricted to [0, N)
    finite_atomic,  // sum w_i e^{-x_i t}
    sum             // superposition of kernels
  };

  static Kernel exponential(double beta, double scale = 1.0) {
    if (beta < 0.0) throw std::domain_error("exponential kernel: beta must be >= 0");
    Kernel k(Form::exponential, scale);
    k.beta_ = beta;
    k.measure_.add_atom(beta, scale);
    return k;
  }

  static Kernel power_law(double hurst, double scale = 1.0) {
    if (!(hurst > 0.0 && hurst < 0.5))
      throw std::domain_error("power-law kernel: H must lie in (0, 1/2)");
    Kernel k(Form::power_law, scale);
    k.hurst_ = hurst;
    k.measure_.add_density(std::make_shared<GammaDensity>(0.0, hurst), scale);
    return k;
  }

  static Kernel gamma_kernel(double beta, double hurst, double scale = 1.0) {
    if (!(beta > 0.0)) throw std::domain_error("gamma kernel: beta must be > 0");
    if (!(hurst > 0.0 && hurst <= 0.5))
      throw std::domain_error("gamma kernel: H must lie in (0, 1/2]");
    Kernel k(Form::gamma, scale);
    k.beta_ = beta;
    k.hurst_ = hurst;
    if (hurst == 0.5)
      k.measure_.add_atom(beta, scale);  // H = 1/2 degenerates to e^{-beta t}
    else
      k.measure_.add_density(std::make_shared<GammaDensity>(beta, hurst), scale);
    return k;
  }

  // Resolvent-type kernel lambda t^{H-1/2} E_{H+1/2,H+1/2}(-lambda t^{H+1/2}).
  // Its Bernstein measure is lambda times the spectral density of 1/(s^a+lambda).
  static Kernel ml_resolvent(double lambda, double hurst, double scale = 1.0) {
    if (!(lambda > 0.0)) throw std::domain_error("ml_resolvent kernel: lambda must be > 0");
    if (!(hurst > 0.0 && hurst < 0.5))
      throw std::domain_error("ml_resolvent kernel: H must lie in (0, 1/2)");
    Kernel k(Form::ml_resolvent, scale);
    k.lambda_ = lambda;
    k.hurst_ = hurst;
    k.measure_.add_density(std::make_shared<MittagLefflerDensity>(lambda, hurst),
                           scale * lambda);
    return k;
  }

  static Kernel finite_atomic(std::vector<double> nodes, std::vector<double> weights,
                              double scale = 1.0) {
    if (nodes.size() != weights.size() || nodes.empty())
      throw std::domain_error("finite_atomic kernel: need matching nonempty nodes/weights");
    Kernel k(Form::finite_atomic, scale);
    k.nodes_ = std::move(nodes);
    k.weights_ = std::move(weights);
    for (std::size_t i = 0; i < k.nodes_.size(); ++i)
      k.measure_.add_atom(k.nodes_[i], scale * k.weights_[i]);
    return k;
  }

  static Kernel sum_of(std::vector<Kernel> terms, double scale = 1.0) {
    if (terms.empty()) throw std::domain_error("sum kernel: need at least one term");
    Kernel k(Form::sum, scale);
    k.children_ = std::move(terms);
    for (const Kernel& c : k.children_) k.measure_.append(c.measure_, scale);
    return k;
  }

  // K(t + eps); mu_shift(dx) = e^{-x eps} mu(dx).
  Kernel shifted(double eps) const {
    if (!(eps > 0.0)) throw std::domain_error("shifted kernel: eps must be > 0");
    Kernel k(Form::shifted, 1.0);
    k.eps_ = eps;
    k.children_.push_back(*this);
    k.measure_ = measure_.shifted(eps);
    return k;
  }

  // e^{-beta t} K(t); the measure translates by beta.
  Kernel damped(double beta) const {
    if (beta < 0.0) throw std::domain_error("damped kernel: beta must be >= 0");
    Kernel k(Form::damped, 1.0);
    k.beta_ = beta;
    k.children_.push_back(*this);
    k.measure_ = measure_.damped(beta);
    return k;
  }

  // Measure restricted to [0, N); no closed form, evaluation goes through the
  // measure.  The result is bounded at t = 0 by mu([0, N)).
  Kernel truncated(double cutoff) const {
    if (!(cutoff > 0.0)) throw std::domain_error("truncated kernel: N must be > 0");
    Kernel k(Form::truncated, 1.0);
    k.cutoff_ = cutoff;
    k.children_.push_back(*this);
    k.measure_ = measure_.truncated(cutoff);
    return k;
  }

  double eval(double t) const {
    if (!(t > 0.0)) throw std::domain_error("kernel evaluation requires t > 0");
    switch (form_) {
      case Form::exponential:
        return scale_ * std::exp(-beta_ * t);
      case Form::power_law:
        return scale_ * std::pow(t, hurst_ - 0.5);
      case Form::gamma:
        return scale_ * std::exp(-beta_ * t) * std::pow(t, hurst_ - 0.5);
      case Form::ml_resolvent: {
        const double a = hurst_ + 0.5;
        return scale_ * lambda_ * std::pow(t, hurst_ - 0.5) *
               mittag_leffler(a, a, -lambda_ * std::pow(t, a));
      }
      case Form::shifted:
        return scale_ * children_[0].eval(t + eps_);
      case Form::damped:
        return scale_ * std::exp(-beta_ * t) * children_[0].eval(t);
      case Form::truncated:
        return scale_ * measure_.laplace(t);
      case Form::finite_atomic: {
        KahanSum s;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
          s.add(weights_[i] * std::exp(-nodes_[i] * t));
        return scale_ * s.value();
      }
      case Form::sum: {
        KahanSum s;
        for (const Kernel& c : children_) s.add(c.eval(t));
        return scale_ * s.value();
      }
    }
    throw std::logic_error("unreachable kernel form");
  }

  double operator()(double t) const { return eval(t); }

  // Quadrature route through the Bernstein measure.
  double eval_via_measure(double t, double rel_tol = 1e-9) const {
    if (!(t > 0.0)) throw std::domain_error("kernel evaluation requires t > 0");
    return measure_.laplace(t, rel_tol);
  }

  MeasureIntegral eval_via_measure_detailed(double t, double rel_tol = 1e-9) const {
    if (!(t > 0.0)) throw std::domain_error("kernel evaluation requires t > 0");
    return measure_.laplace_detailed(t, rel_tol);
  }

  // \int_a^b K(s) ds for 0 <= a < b, in closed form where the form admits one.
  double integral(double a, double b) const {
    if (!(a >= 0.0) || !(b > a)) throw std::domain_error("kernel integral: need 0 <= a < b");
    switch (form_) {
      case Form::exponential:
        if (beta_ == 0.0) return scale_ * (b - a);
        return scale_ * std::exp(-beta_ * a) * (-std::expm1(-beta_ * (b - a))) / beta_;
      case Form::power_law: {
        const double e = hurst_ + 0.5;
        return scale_ * (std::pow(b, e) - std::pow(a, e)) / e;
      }
      case Form::gamma: {
        if (hurst_ == 0.5)
          return scale_ * std::exp(-beta_ * a) * (-std::expm1(-beta_ * (b - a))) / beta_;
        const double e = hurst_ + 0.5;
        // int_a^b e^{-beta s} s^{e-1} ds via the regularized incomplete gamma;
        // switch to the upper tail when both arguments sit deep in it.
        const double pa = lower_gamma_regularized(e, beta_ * a);
        const double diff = pa < 0.5
                                ? lower_gamma_regularized(e, beta_ * b) - pa
                                : upper_gamma_regularized(e, beta_ * a) -
                                      upper_gamma_regularized(e, beta_ * b);
        return scale_ * std::exp(log_gamma(e) - e * std::log(beta_)) * diff;
      }
      case Form::ml_resolvent: {
        // int_0^t R = 1 - E_{a,1}(-lambda t^a)
        const double alpha = hurst_ + 0.5;
        const double ea = mittag_leffler(alpha, 1.0, -lambda_ * std::pow(a, alpha));
        const double eb = mittag_leffler(alpha, 1.0, -lambda_ * std::pow(b, alpha));
        return scale_ * (ea - eb);
      }
      case Form::shifted:
        return scale_ * children_[0].integral(a + eps_, b + eps_);
      case Form::finite_atomic: {
        KahanSum s;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
          const double x = nodes_[i];
          if (x == 0.0)
            s.add(weights_[i] * (b - a));
          else
            s.add(weights_[i] * std::exp(-x * a) * (-std::expm1(-x * (b - a))) / x);
        }
        return scale_ * s.value();
      }
      case Form::sum: {
        KahanSum s;
        for (const Kernel& c : children_) s.add(c.integral(a, b));
        return scale_ * s.value();
      }
      case Form::damped:
      case Form::truncated:
        break;  // fall through to the measure route
    }
    MeasureIntegral r = measure_.integrate(IntegrandWeight::cell(a, b), 0.0,
                                           std::numeric_limits<double>::infinity());
    return r.value.value();
  }

  double average(double a, double b) const { return integral(a, b) / (b - a); }

  // sigma0 with K(t) ~ c t^{-sigma0} as t -> 0+ (0 for bounded kernels).
  double singularity_exponent() const {
    switch (form_) {
      case Form::power_law:
      case Form::ml_resolvent:
        return 0.5 - hurst_;
      case Form::gamma:
        return hurst_ == 0.5 ? 0.0 : 0.5 - hurst_;
      case Form::damped:
        return children_[0].singularity_exponent();
      case Form::sum: {
        double m = 0.0;
        for (const Kernel& c : children_) m = std::max(m, c.singularity_exponent());
        return m;
      }
      default:
        return 0.0;
    }
  }

  bool bounded_at_zero() const { return singularity_exponent() <= 0.0; }

  // L^gamma([0, T]) norm (\int_0^T K^gamma)^{1/gamma}.  Throws
  // NonIntegrableError when gamma * sigma0 >= 1 (for power-law type kernels
  // this is the condition gamma < 2/(1-2H)).
  double lgamma_norm(double gamma_exp, double horizon) const {
    if (!(gamma_exp >= 1.0)) throw std::domain_error("lgamma_norm: gamma must be >= 1");
    if (!(horizon > 0.0)) throw std::domain_error("lgamma_norm: T must be > 0");
    const double sigma0 = singularity_exponent();
    if (gamma_exp * sigma0 >= 1.0 - 1e-12)
      throw NonIntegrableError(
          "kernel is not in L^gamma([0,T]): gamma * " + std::to_string(sigma0) +
          " >= 1; power-law type kernels require gamma < 2/(1-2H)");
    switch (form_) {
      case Form::exponential: {
        if (beta_ == 0.0) return scale_ * std::pow(horizon, 1.0 / gamma_exp);
        const double g = gamma_exp * beta_;
        return scale_ * std::pow(-std::expm1(-g * horizon) / g, 1.0 / gamma_exp);
      }
      case Form::power_law: {
        const double e = gamma_exp * (hurst_ - 0.5) + 1.0;
        return scale_ * std::pow(std::pow(horizon, e) / e, 1.0 / gamma_exp);
      }
      case Form::gamma: {
        if (hurst_ == 0.5) {
          const double g = gamma_exp * beta_;
          return scale_ * std::pow(-std::expm1(-g * horizon) / g, 1.0 / gamma_exp);
        }
        const double e = gamma_exp * (hurst_ - 0.5) + 1.0;
        const double g = gamma_exp * beta_;
        const double integral_value = std::exp(log_gamma(e) - e * std::log(g)) *
                                      lower_gamma_regularized(e, g * horizon);
        return scale_ * std::pow(integral_value, 1.0 / gamma_exp);
      }
      default:
        break;
    }
    // Quadrature with the left-endpoint singularity t^{-gamma*sigma0} removed;
    // gamma * sigma0 < 1 keeps eval(u)^gamma * u^{gamma*sigma0} bounded.
    const double s_eff = gamma_exp * sigma0;
    QuadResult q;
    if (s_eff > 0.0) {
      auto regular = [&](double u) {
        if (u <= 0.0) return 0.0;
        return std::pow(eval(u), gamma_exp) * std::pow(u, s_eff);
      };
      q = integrate_singular_left(regular, 0.0, horizon, s_eff, 0.0, 1e-10);
    } else {
      auto f = [&](double u) { return std::pow(eval(u), gamma_exp); };
      q = integrate(f, 0.0, horizon, 0.0, 1e-10);
    }
    return std::pow(q.value, 1.0 / gamma_exp);
  }

  const BernsteinMeasure& measure() const { return measure_; }
  Form form() const { return form_; }
  double scale() const { return scale_; }
  double beta() const { return beta_; }
  double hurst() const { return hurst_; }
  double lambda() const { return lambda_; }
  double shift_eps() const { return eps_; }
  double cutoff() const { return cutoff_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Kernel>& children() const { return children_; }

 private:
  Kernel(Form f, double scale) : form_(f), scale_(scale) {
    if (!(scale > 0.0)) throw std::domain_error("kernel scale must be > 0");
  }

  Form form_;
  double scale_;
  double beta_ = 0.0;
  double hurst_ = 0.0;
  double lambda_ = 0.0;
  double eps_ = 0.0;
  double cutoff_ = 0.0;
  std::vector<double> nodes_, weights_;
  std::vector<Kernel> children_;
  BernsteinMeasure measure_;
};

// M_p = \int x^{(2-p)/(2p)} mu(dx); the uniform-in-time bound applies only
// when this is finite (e.g. p > 1/H for the gamma and resolvent kernels).
inline ExtendedReal mp_condition(const Kernel& k, double p) {
  if (!(p >= 2.0)) throw std::domain_error("mp_condition: p must be >= 2");
  return k.measure().moment((2.0 - p) / (2.0 * p), 0.0,
                            std::numeric_limits<double>::infinity());
}

// Numeric proxy for complete monotonicity: on a uniform grid the first-order
// differences must be <= 0 and the second-order differences >= 0.
inline bool numerically_completely_monotone(const Kernel& k, double t0 = 0.1,
                                            double t1 = 5.0, std::size_t n = 50,
                                            double tol = 1e-9) {
  std::vector<double> v(n);
  const double dt = (t1 - t0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = k.eval(t0 + dt * static_cast<double>(i));
  const double scale = std::abs(v.front()) + 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (v[i + 1] - v[i] > tol * scale) return false;
  for (std::size_t i = 0; i + 2 < n; ++i)
    if (v[i + 2] - 2.0 * v[i + 1] + v[i] < -tol * scale) return false;
  return true;
}

}  // namespace vklab
