#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "vklab/density.hpp"
#include "vklab/quadrature.hpp"

namespace vklab {

struct Atom {
  double location;  // x >= 0
  double mass;      // w > 0
};

// Weight function W(x) for integrals \int W(x) mu(dx), together with the
// analytic metadata needed to classify improper integrals:
//   W(x) ~ c x^{power_at_zero}                       as x -> 0+
//   W(x) ~ c x^{tail_power} e^{-exp_rate x}          as x -> inf.
// regular0(u) = W(u) u^{-power_at_zero} must stay bounded near zero.
struct IntegrandWeight {
  std::function<double(double)> f;
  std::function<double(double)> regular0;
  double power_at_zero = 0.0;
  double tail_power = 0.0;
  double exp_rate = 0.0;

  static IntegrandWeight laplace(double t) {
    IntegrandWeight w;
    w.f = [t](double x) { return std::exp(-x * t); };
    w.regular0 = w.f;
    w.exp_rate = t;
    return w;
  }

  static IntegrandWeight power(double theta) {
    IntegrandWeight w;
    w.f = [theta](double x) { return std::pow(x, theta); };
    w.regular0 = [](double) { return 1.0; };
    w.power_at_zero = theta;
    w.tail_power = theta;
    return w;
  }

  // \int_a^b e^{-x s} ds = (e^{-xa} - e^{-xb}) / x, the weight whose measure
  // integral is \int_a^b K(s) ds.
  static IntegrandWeight cell(double a, double b) {
    IntegrandWeight w;
    const double len = b - a;
    w.f = [a, len](double x) {
      if (x * len < 1e-12) return std::exp(-x * a) * len * (1.0 - 0.5 * x * len);
      return std::exp(-x * a) * (-std::expm1(-x * len)) / x;
    };
    w.regular0 = w.f;
    w.tail_power = -1.0;
    w.exp_rate = a;
    return w;
  }

  static IntegrandWeight generic(std::function<double(double)> fn, double power0,
                                 double tail_pow, double rate) {
    IntegrandWeight w;
    w.f = std::move(fn);
    w.regular0 = w.f;
    w.power_at_zero = power0;
    w.tail_power = tail_pow;
    w.exp_rate = rate;
    return w;
  }
};

struct MeasureIntegral {
  ExtendedReal value;
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

// Nonnegative measure mu on [0, inf) given by atoms plus weighted density
// components, optionally restricted to [0, upper_cutoff).  Represents a
// completely monotone kernel through K(t) = \int e^{-xt} mu(dx).
class BernsteinMeasure {
 public:
  struct Component {
    double weight;
    DensityPtr density;
    // Per-component support restriction to [0, cutoff); finite only for
    // components inherited from an already-truncated measure.
    double cutoff = std::numeric_limits<double>::infinity();
  };

  BernsteinMeasure() = default;

  void add_atom(double location, double mass) {
    if (!(location >= 0.0) || !std::isfinite(location))
      throw std::domain_error("BernsteinMeasure: atom location must be finite and >= 0");
    if (!(mass > 0.0)) throw std::domain_error("BernsteinMeasure: atom mass must be > 0");
    atoms_.push_back({location, mass});
  }

  void add_density(DensityPtr d, double weight = 1.0) {
    if (!(weight > 0.0)) throw std::domain_error("BernsteinMeasure: density weight must be > 0");
    densities_.push_back({weight, std::move(d)});
  }

  void set_upper_cutoff(double n) {
    if (!(n > 0.0)) throw std::domain_error("BernsteinMeasure: cutoff must be > 0");
    upper_cutoff_ = upper_cutoff_ ? std::min(*upper_cutoff_, n) : n;
    std::erase_if(atoms_, [&](const Atom& a) { return a.location >= *upper_cutoff_; });
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Component>& densities() const { return densities_; }
  std::optional<double> upper_cutoff() const { return upper_cutoff_; }
  bool empty() const { return atoms_.empty() && densities_.empty(); }

  void scale(double c) {
    if (!(c > 0.0)) throw std::domain_error("BernsteinMeasure: scale must be > 0");
    for (auto& a : atoms_) a.mass *= c;
    for (auto& d : densities_) d.weight *= c;
  }

  // mu_shift(dx) = e^{-x eps} mu(dx);  Laplace transform K(t + eps).
  BernsteinMeasure shifted(double eps) const {
    if (!(eps > 0.0)) throw std::domain_error("shifted: eps must be > 0");
    BernsteinMeasure out;
    for (const Atom& a : atoms_)
      out.atoms_.push_back({a.location, a.mass * std::exp(-a.location * eps)});
    for (const Component& c : densities_)
      out.densities_.push_back(
          {c.weight, std::make_shared<ExpWeightedDensity>(c.density, eps), c.cutoff});
    out.upper_cutoff_ = upper_cutoff_;
    return out;
  }

  // Translation by beta;  Laplace transform e^{-beta t} K(t).
  BernsteinMeasure damped(double beta) const {
    if (beta < 0.0) throw std::domain_error("damped: beta must be >= 0");
    if (beta == 0.0) return *this;
    BernsteinMeasure out;
    for (const Atom& a : atoms_) out.atoms_.push_back({a.location + beta, a.mass});
    for (const Component& c : densities_)
      out.densities_.push_back(
          {c.weight, std::make_shared<DampedShiftDensity>(c.density, beta), c.cutoff + beta});
    if (upper_cutoff_) out.upper_cutoff_ = *upper_cutoff_ + beta;
    return out;
  }

  // Restriction to [0, n); atoms at or beyond n are dropped.
  BernsteinMeasure truncated(double n) const {
    BernsteinMeasure out = *this;
    out.set_upper_cutoff(n);
    return out;
  }

  // Superposition: adds extra_scale * other to this measure.  The other
  // measure's cutoff becomes a per-component restriction so that measures
  // with different truncation levels can be combined.
  void append(const BernsteinMeasure& other, double extra_scale = 1.0) {
    const double oc = other.upper_cutoff_ ? *other.upper_cutoff_
                                          : std::numeric_limits<double>::infinity();
    for (const Atom& a : other.atoms_) atoms_.push_back({a.location, a.mass * extra_scale});
    for (const Component& c : other.densities_)
      densities_.push_back({c.weight * extra_scale, c.density, std::min(c.cutoff, oc)});
  }

  MeasureIntegral integrate(const IntegrandWeight& w, double lo, double hi,
                            double rel_tol = 1e-9) const;

  // \int e^{-xt} mu(dx); throws QuadratureError on gross non-convergence.
  double laplace(double t, double rel_tol = 1e-9) const {
    MeasureIntegral r = integrate(IntegrandWeight::laplace(t), 0.0,
                                  std::numeric_limits<double>::infinity(), rel_tol);
    const double v = r.value.value();
    if (!r.converged && r.error > 1e-6 * std::max(std::abs(v), 1e-300))
      throw QuadratureError("laplace transform quadrature did not converge", v, r.error);
    return v;
  }

  MeasureIntegral laplace_detailed(double t, double rel_tol = 1e-9) const {
    return integrate(IntegrandWeight::laplace(t), 0.0,
                     std::numeric_limits<double>::infinity(), rel_tol);
  }

  // \int_{[lo,hi)} x^theta mu(dx) with divergence reported as the infinite tag.
  // A Beta-function closed form covers the bare GammaDensity on its full
  // support; everything else is singularity-aware quadrature.
  ExtendedReal moment(double theta, double lo, double hi, double rel_tol = 1e-9,
                      bool use_closed_forms = true) const;

  // Total mass of [lo, hi); requires a finite result.
  double mass(double lo, double hi, double rel_tol = 1e-9) const {
    ExtendedReal m = moment(0.0, lo, hi, rel_tol);
    if (m.is_infinite()) throw NonIntegrableError("mass: measure has infinite mass on range");
    return m.value();
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<Component> densities_;
  std::optional<double> upper_cutoff_;
};

inline MeasureIntegral BernsteinMeasure::integrate(const IntegrandWeight& w, double lo,
                                                   double hi, double rel_tol) const {
  MeasureIntegral out;
  KahanSum total;
  double err = 0.0;
  bool converged = true;

  double hi_clip = hi;
  if (upper_cutoff_) hi_clip = std::min(hi_clip, *upper_cutoff_);

  // Atoms on [lo, hi_clip).  x = 0 needs the power-at-zero classification:
  // x^theta with theta < 0 makes the atom contribution infinite.
  for (const Atom& a : atoms_) {
    if (a.location < lo || a.location >= hi_clip) continue;
    if (a.location == 0.0 && w.power_at_zero < 0.0) return {ExtendedReal::infinity()};
    const double wx = a.location == 0.0 && w.power_at_zero == 0.0 ? w.regular0(0.0)
                                                                  : w.f(a.location);
    total.add(a.mass * wx);
  }

  for (const Component& comp : densities_) {
    const DensityComponent& d = *comp.density;
    const double a0 = std::max(lo, d.support_lower());
    const double b0 = std::min(hi_clip, comp.cutoff);
    if (!(b0 > a0)) continue;

    const bool from_edge = lo <= d.support_lower();
    const double s = d.singular_exponent();

    // Divergence at the left edge: only possible when the support starts at 0
    // and the weight carries a negative power there.
    if (from_edge && d.support_lower() == 0.0) {
      if (w.power_at_zero - s <= -1.0 + 1e-12) return {ExtendedReal::infinity()};
    }

    const bool infinite_hi = !std::isfinite(b0);
    const double rate = w.exp_rate + d.exp_decay();
    if (infinite_hi && rate <= 0.0) {
      if (w.tail_power - d.tail_exponent() >= -1.0 - 1e-12) return {ExtendedReal::infinity()};
    }

    // Head interval, substituted when the density (possibly combined with a
    // power weight at zero) is singular at the left edge.
    double s_eff = from_edge ? s : 0.0;
    if (from_edge && d.support_lower() == 0.0) s_eff = s - w.power_at_zero;
    const double head_scale = a0 <= 1.0 ? 1.0 : 0.5 * a0;
    const double h = std::min(b0 - a0, head_scale);
    KahanSum piece;
    double piece_err = 0.0;

    if (s_eff > 0.0 && from_edge) {
      // transformed integrand: W(x) value(x) (x-a0)^{s_eff}, assembled from
      // the cancellation-free pieces.  A density with s <= 0 (vanishing at
      // the edge) can still land here when the weight drags the combined
      // exponent negative; its flattened form is value(u) u^s directly.
      auto regular = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double wreg = d.support_lower() == 0.0 ? w.regular0(u) : w.f(a0 + u);
        const double dreg =
            s > 0.0 ? d.regular_part(u) : d.value(u) * std::pow(u, s);
        return wreg * dreg;
      };
      QuadResult q = integrate_singular_left(regular, a0, a0 + h, s_eff, 0.0, rel_tol);
      piece.add(q.value);
      piece_err += q.error;
      out.evaluations += q.evaluations;
      converged = converged && q.converged;
    } else {
      auto g = [&](double x) { return w.f(x) * d.value(x); };
      QuadResult q = vklab::integrate(g, a0, a0 + h, 0.0, rel_tol);
      piece.add(q.value);
      piece_err += q.error;
      out.evaluations += q.evaluations;
      converged = converged && q.converged;
    }

    // Geometric panels out to the right end.
    auto g = [&](double x) { return w.f(x) * d.value(x); };
    double x_left = a0 + h;
    if (infinite_hi) {
      const double r_comb = d.tail_exponent() - w.tail_power;
      const double x_stop = rate > 0.0 ? a0 + 60.0 / rate : 0.0;
      double tail_est = 0.0;
      int panel = 0;
      for (; panel < 200; ++panel) {
        const double x_right = 2.0 * x_left + 1.0;
        QuadResult q = vklab::integrate(g, x_left, x_right, 0.0, rel_tol);
        piece.add(q.value);
        piece_err += q.error;
        out.evaluations += q.evaluations;
        const double acc = std::max(std::abs(piece.value()), 1e-300);
        x_left = x_right;
        if (rate > 0.0) {
          if (x_right >= x_stop && std::abs(q.value) <= 0.01 * rel_tol * acc) break;
        } else {
          // Power tail: once the leading-order remainder estimate
          //   \int_X^inf ~ g(X) X / (r_comb - 1)
          // is below tolerance, add it and stop.
          tail_est = g(x_right) * x_right / (r_comb - 1.0);
          if (tail_est <= 0.5 * rel_tol * acc) break;
        }
      }
      if (rate <= 0.0) {
        piece.add(tail_est);
        piece_err += 0.05 * std::abs(tail_est);
      }
      if (panel >= 200) converged = false;
    } else {
      while (x_left < b0) {
        const double x_right = std::min(b0, 2.0 * x_left + 1.0);
        QuadResult q = vklab::integrate(g, x_left, x_right, 0.0, rel_tol);
        piece.add(q.value);
        piece_err += q.error;
        out.evaluations += q.evaluations;
        converged = converged && q.converged;
        x_left = x_right;
      }
    }

    total.add(comp.weight * piece.value());
    err += comp.weight * piece_err;
  }

  out.value = ExtendedReal::finite(total.value());
  out.error = err;
  out.converged = converged;
  return out;
}

inline ExtendedReal BernsteinMeasure::moment(double theta, double lo, double hi,
                                             double rel_tol, bool use_closed_forms) const {
  // Closed form for a bare GammaDensity over its full support:
  //   \int_beta^inf x^theta (x - beta)^{-s} dx = beta^{theta-s+1} B(s-theta-1, 1-s),
  // finite exactly when theta < s - 1.
  if (use_closed_forms && !upper_cutoff_ && !std::isfinite(hi)) {
    bool all_closed = true;
    KahanSum closed;
    for (const Component& comp : densities_) {
      const auto* gd = dynamic_cast<const GammaDensity*>(comp.density.get());
      if (gd == nullptr || gd->beta() <= 0.0 || lo > gd->beta() ||
          std::isfinite(comp.cutoff)) {
        all_closed = false;
        break;
      }
      const double s = gd->singular_exponent();
      if (theta >= s - 1.0 - 1e-14) return ExtendedReal::infinity();
      const double b = gd->beta();
      closed.add(comp.weight * std::pow(b, theta - s + 1.0) * beta_fn(s - theta - 1.0, 1.0 - s) /
                 gamma_fn(1.0 - s));
    }
    if (all_closed) {
      for (const Atom& a : atoms_) {
        if (a.location < lo) continue;
        if (a.location == 0.0) {
          if (theta < 0.0) return ExtendedReal::infinity();
          closed.add(theta == 0.0 ? a.mass : 0.0);
        } else {
          closed.add(a.mass * std::pow(a.location, theta));
        }
      }
      return ExtendedReal::finite(closed.value());
    }
  }
  MeasureIntegral r = integrate(IntegrandWeight::power(theta), lo, hi, rel_tol);
  return r.value;
}

}  // namespace vklab
