#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>

#include "vklab/specfun.hpp"

namespace vklab {

// One absolutely-continuous component of a Bernstein measure.  Besides point
// evaluation, implementations expose the analytic structure the integration
// layer needs: the left-endpoint singularity exponent with its regularized
// form, and the power/exponential tail behaviour at infinity.
class DensityComponent {
 public:
  virtual ~DensityComponent() = default;

  // d(mu)/dx at x; zero outside the support.
  virtual double value(double x) const = 0;

  // Support is contained in [support_lower(), inf).
  virtual double support_lower() const = 0;

  // s with value(lo + u) ~ regular_part(0) u^{-s} as u -> 0+; s <= 0 means the
  // density is bounded (or vanishes) at the left endpoint.
  virtual double singular_exponent() const = 0;

  // value(lo + u) * u^s computed without cancellation; bounded as u -> 0+.
  virtual double regular_part(double u) const = 0;

  // value(x) ~ tail_coefficient() * x^{-tail_exponent()} * e^{-exp_decay() x}
  // as x -> inf.
  virtual double tail_exponent() const = 0;
  virtual double tail_coefficient() const = 0;
  virtual double exp_decay() const = 0;
};

using DensityPtr = std::shared_ptr<const DensityComponent>;

// (x - beta)^{-H-1/2} / Gamma(1/2 - H) on (beta, inf); the Laplace transform
// is e^{-beta t} t^{H-1/2}.
class GammaDensity final : public DensityComponent {
 public:
  GammaDensity(double beta, double hurst) : beta_(beta), hurst_(hurst) {
    if (beta < 0.0) throw std::domain_error("GammaDensity: beta must be >= 0");
    if (!(hurst > 0.0 && hurst < 0.5))
      throw std::domain_error("GammaDensity: H must lie in (0, 1/2)");
    s_ = hurst_ + 0.5;
    norm_ = 1.0 / gamma_fn(0.5 - hurst_);
  }

  double value(double x) const override {
    if (x <= beta_) return 0.0;
    return norm_ * std::pow(x - beta_, -s_);
  }
  double support_lower() const override { return beta_; }
  double singular_exponent() const override { return s_; }
  double regular_part(double) const override { return norm_; }
  double tail_exponent() const override { return s_; }
  double tail_coefficient() const override { return norm_; }
  double exp_decay() const override { return 0.0; }

  double beta() const { return beta_; }
  double hurst() const { return hurst_; }

 private:
  double beta_, hurst_, s_, norm_;
};

// Spectral density of the power-law resolvent kernel,
//   (1/pi) x^a sin(pi a) / (x^{2a} + 2 lambda x^a cos(pi a) + lambda^2)
// with a = H + 1/2.  Its Laplace transform is t^{H-1/2} E_{a,a}(-lambda t^a).
class MittagLefflerDensity final : public DensityComponent {
 public:
  MittagLefflerDensity(double lambda, double hurst) : lambda_(lambda), hurst_(hurst) {
    if (!(lambda > 0.0)) throw std::domain_error("MittagLefflerDensity: lambda must be > 0");
    if (!(hurst > 0.0 && hurst < 0.5))
      throw std::domain_error("MittagLefflerDensity: H must lie in (0, 1/2)");
    a_ = hurst_ + 0.5;
    sin_ = std::sin(M_PI * a_);
    cos_ = std::cos(M_PI * a_);
  }

  double value(double x) const override {
    if (x <= 0.0) return 0.0;
    const double xa = std::pow(x, a_);
    // denominator = (xa + lambda cos)^2 + lambda^2 sin^2 > 0
    const double den = xa * xa + 2.0 * lambda_ * cos_ * xa + lambda_ * lambda_;
    return (sin_ / M_PI) * xa / den;
  }
  double support_lower() const override { return 0.0; }
  double singular_exponent() const override { return -a_; }  // vanishes at 0
  double regular_part(double u) const override { return value(u); }
  double tail_exponent() const override { return a_; }
  double tail_coefficient() const override { return sin_ / M_PI; }
  double exp_decay() const override { return 0.0; }

  double lambda() const { return lambda_; }
  double hurst() const { return hurst_; }

 private:
  double lambda_, hurst_, a_, sin_, cos_;
};

// x -> inner(x - beta) on (beta + inner support, inf); Laplace transform
// e^{-beta t} K_inner(t).
class DampedShiftDensity final : public DensityComponent {
 public:
  DampedShiftDensity(DensityPtr inner, double beta) : inner_(std::move(inner)), beta_(beta) {
    if (beta < 0.0) throw std::domain_error("DampedShiftDensity: beta must be >= 0");
  }

  double value(double x) const override { return inner_->value(x - beta_); }
  double support_lower() const override { return beta_ + inner_->support_lower(); }
  double singular_exponent() const override { return inner_->singular_exponent(); }
  double regular_part(double u) const override { return inner_->regular_part(u); }
  double tail_exponent() const override { return inner_->tail_exponent(); }
  double tail_coefficient() const override { return inner_->tail_coefficient(); }
  double exp_decay() const override { return inner_->exp_decay(); }

 private:
  DensityPtr inner_;
  double beta_;
};

// x -> e^{-eps x} inner(x); Laplace transform K_inner(t + eps).
class ExpWeightedDensity final : public DensityComponent {
 public:
  ExpWeightedDensity(DensityPtr inner, double eps) : inner_(std::move(inner)), eps_(eps) {
    if (!(eps > 0.0)) throw std::domain_error("ExpWeightedDensity: eps must be > 0");
  }

  double value(double x) const override { return std::exp(-eps_ * x) * inner_->value(x); }
  double support_lower() const override { return inner_->support_lower(); }
  double singular_exponent() const override { return inner_->singular_exponent(); }
  double regular_part(double u) const override {
    return std::exp(-eps_ * (inner_->support_lower() + u)) * inner_->regular_part(u);
  }
  double tail_exponent() const override { return inner_->tail_exponent(); }
  double tail_coefficient() const override { return inner_->tail_coefficient(); }
  double exp_decay() const override { return inner_->exp_decay() + eps_; }

 private:
  DensityPtr inner_;
  double eps_;
};

}  // namespace vklab
