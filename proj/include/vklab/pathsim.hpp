#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "vklab/grid.hpp"
#include "vklab/kernel.hpp"
#include "vklab/rng.hpp"

namespace vklab {

// Brownian increments dW_k ~ N(0, dt), k = 0..steps-1, drawn from the
// counter-based stream keyed by (seed, path_index, k): identical inputs give
// identical increments no matter how paths are scheduled across workers.
struct BrownianPath {
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::vector<double> increments;
};

inline BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed,
                                    std::uint64_t path_index) {
  BrownianPath bw;
  bw.seed = seed;
  bw.path_index = path_index;
  bw.increments.resize(grid.steps);
  const double sqrt_dt = std::sqrt(grid.dt());
  for (std::size_t k = 0; k < grid.steps; ++k)
    bw.increments[k] = sqrt_dt * normal_draw(seed, path_index, k);
  return bw;
}

// Diffusion coefficient with the analytic facts (bound, Lipschitz constant)
// that the error estimates need.
struct SigmaFn {
  std::function<double(double)> f;
  std::string name;
  bool bounded = false;
  double bound = std::numeric_limits<double>::infinity();
  double lipschitz = 0.0;

  double operator()(double x) const { return f(x); }

  static SigmaFn constant(double c) {
    SigmaFn s;
    s.f = [c](double) { return c; };
    s.name = "constant";
    s.bounded = true;
    s.bound = std::abs(c);
    s.lipschitz = 0.0;
    return s;
  }

  // (1 + x^2)^{-1/2} + 1/2: smooth, bounded by 3/2, Lipschitz.
  static SigmaFn bounded_smooth() {
    SigmaFn s;
    s.f = [](double x) { return 1.0 / std::sqrt(1.0 + x * x) + 0.5; };
    s.name = "bounded_smooth";
    s.bounded = true;
    s.bound = 1.5;
    s.lipschitz = 0.65;
    return s;
  }

  // 0.5 (1 + min(|x|, 10)): Lipschitz with linear growth, capped.
  static SigmaFn linear_growth_capped() {
    SigmaFn s;
    s.f = [](double x) { return 0.5 * (1.0 + std::min(std::abs(x), 10.0)); };
    s.name = "linear_growth_capped";
    s.bounded = true;
    s.bound = 5.5;
    s.lipschitz = 0.5;
    return s;
  }
};

struct SveSpec {
  std::function<double(double)> initial_curve;  // x0(t)
  SigmaFn sigma;
  Kernel kernel;
  double mean_reversion = 0.0;  // lambda; drift -lambda \int K(t-s) X_s ds
};

// Cell-averaged weights Kbar_l = dt^{-1} \int_{(l-1)dt}^{l dt} K, l = 1..steps.
// This is the discrete-convolution weighting that keeps singular kernels
// finite at lag zero and matches the Ito isometry to first order.
inline std::vector<double> cell_averaged_weights(const Kernel& k, const TimeGrid& grid) {
  std::vector<double> w(grid.steps + 1, 0.0);
  for (std::size_t l = 1; l <= grid.steps; ++l)
    w[l] = k.average(grid.node(l - 1), grid.node(l));
  return w;
}

inline constexpr double kDivergenceThreshold = 1e12;

// I_{t_k} = sum_{j<k} Kbar_{k-j} phi_j dW_j (lower-triangular accumulation).
inline std::vector<double> volterra_integral_path(std::span<const double> kbar,
                                                  std::span<const double> phi,
                                                  const BrownianPath& bw) {
  const std::size_t n = bw.increments.size();
  std::vector<double> y(n);
  for (std::size_t j = 0; j < n; ++j) y[j] = phi[j] * bw.increments[j];
  std::vector<double> path(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += kbar[k - j] * y[j];
    path[k] = acc;
  }
  return path;
}

// Terminal value only, O(steps).
inline double volterra_integral_terminal(std::span<const double> kbar,
                                         std::span<const double> phi,
                                         const BrownianPath& bw) {
  const std::size_t n = bw.increments.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += kbar[n - j] * phi[j] * bw.increments[j];
  return acc;
}

// Point-weight convolution for finite-atomic kernels, evaluated through the
// per-node factor recursion u_i <- e^{-x_i dt} (u_i + phi_k dW_k) so that
// I_{t_k} = sum_i w_i u_i(k) equals sum_{j<k} K((k-j) dt) phi_j dW_j with
// K((k-j) dt) expanded factor-wise.  This is the convention the Markovian
// lift reproduces exactly.
inline std::vector<double> atomic_point_convolution(const Kernel& kernel,
                                                    std::span<const double> phi,
                                                    const TimeGrid& grid,
                                                    const BrownianPath& bw) {
  if (!kernel.measure().densities().empty())
    throw WrongSchemeError("atomic_point_convolution: kernel must be finite-atomic");
  const auto& atoms = kernel.measure().atoms();
  const std::size_t n = grid.steps;
  const double dt = grid.dt();
  std::vector<double> decay(atoms.size()), u(atoms.size(), 0.0);
  for (std::size_t i = 0; i < atoms.size(); ++i) decay[i] = std::exp(-atoms[i].location * dt);
  std::vector<double> path(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double shock = phi[k] * bw.increments[k];
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      u[i] = decay[i] * (u[i] + shock);
      acc += atoms[i].mass * u[i];
    }
    path[k + 1] = acc;
  }
  return path;
}

// Explicit left-point Euler scheme for
//   X_t = x0(t) - lambda \int_0^t K(t-s) X_s ds + \int_0^t K(t-s) sigma(X_s) dW_s.
inline std::vector<double> sve_euler(const SveSpec& spec, const TimeGrid& grid,
                                     const BrownianPath& bw, std::span<const double> kbar) {
  const std::size_t n = grid.steps;
  const double dt = grid.dt();
  const double lambda = spec.mean_reversion;
  std::vector<double> x(n + 1), shock(n), drift(lambda > 0.0 ? n : 0);
  x[0] = spec.initial_curve(0.0);
  shock[0] = spec.sigma(x[0]) * bw.increments[0];
  if (lambda > 0.0) drift[0] = x[0] * dt;
  for (std::size_t k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += kbar[k - j] * shock[j];
    double dr = 0.0;
    if (lambda > 0.0)
      for (std::size_t j = 0; j < k; ++j) dr += kbar[k - j] * drift[j];
    const double xk = spec.initial_curve(grid.node(k)) - lambda * dr + acc;
    if (!(std::abs(xk) < kDivergenceThreshold)) throw PathDivergedError(k, xk);
    x[k] = xk;
    if (k < n) {
      shock[k] = spec.sigma(xk) * bw.increments[k];
      if (lambda > 0.0) drift[k] = xk * dt;
    }
  }
  return x;
}

inline std::vector<double> sve_euler(const SveSpec& spec, const TimeGrid& grid,
                                     const BrownianPath& bw) {
  const std::vector<double> kbar = cell_averaged_weights(spec.kernel, grid);
  return sve_euler(spec, grid, bw, kbar);
}

struct MultifactorPathResult {
  std::vector<double> path;                  // X_hat at t_0..t_steps
  std::vector<std::vector<double>> factors;  // factors[i][k] = U^{x_i}_{t_k}
};

// Markovian lift for finite-atomic kernels:
//   U^{x_i}_{k+1} = e^{-x_i dt} (U^{x_i}_k + sigma(X_k) dW_k),
//   D^{x_i}_{k+1} = e^{-x_i dt} (D^{x_i}_k + X_k dt)        (lambda > 0 only),
//   X_{k+1} = x0(t_{k+1}) + sum_i w_i (U^{x_i}_{k+1} - lambda D^{x_i}_{k+1}).
// For lambda = 0 this unrolls to exactly the arithmetic of
// atomic_point_convolution plus x0.
inline MultifactorPathResult sve_multifactor(const SveSpec& spec, const TimeGrid& grid,
                                             const BrownianPath& bw,
                                             bool record_factors = false) {
  if (!spec.kernel.measure().densities().empty())
    throw WrongSchemeError("sve_multifactor: kernel must be finite-atomic");
  const auto& atoms = spec.kernel.measure().atoms();
  const std::size_t n = grid.steps;
  const std::size_t m = atoms.size();
  const double dt = grid.dt();
  const double lambda = spec.mean_reversion;

  std::vector<double> decay(m), u(m, 0.0), v(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) decay[i] = std::exp(-atoms[i].location * dt);

  MultifactorPathResult out;
  out.path.resize(n + 1);
  if (record_factors) out.factors.assign(m, std::vector<double>(n + 1, 0.0));
  out.path[0] = spec.initial_curve(0.0);

  for (std::size_t k = 0; k < n; ++k) {
    const double xk = out.path[k];
    const double shock = spec.sigma(xk) * bw.increments[k];
    const double drift_in = xk * dt;
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = decay[i] * (u[i] + shock);
      if (lambda > 0.0) {
        v[i] = decay[i] * (v[i] + drift_in);
        acc += atoms[i].mass * (u[i] - lambda * v[i]);
      } else {
        acc += atoms[i].mass * u[i];
      }
      if (record_factors) out.factors[i][k + 1] = u[i];
    }
    const double next = spec.initial_curve(grid.node(k + 1)) + acc;
    if (!(std::abs(next) < kDivergenceThreshold)) throw PathDivergedError(k + 1, next);
    out.path[k + 1] = next;
  }
  return out;
}

// Runs fn(path_index) over a static partition of [0, count); exceptions are
// rethrown after join.  Results must be written into per-path slots, which
// keeps every reduction independent of the worker count.
template <class Fn>
void parallel_paths(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) {
    workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
  }
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = count * w / workers;
    const std::size_t hi = count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t count = 0;
};

inline McEstimate mc_estimate(std::span<const double> values) {
  McEstimate e;
  e.count = values.size();
  if (values.empty()) return e;
  e.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      sq[i] = (values[i] - e.mean) * (values[i] - e.mean);
    const double var = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  e.ci_lo = e.mean - 1.96 * e.std_error;
  e.ci_hi = e.mean + 1.96 * e.std_error;
  return e;
}

// Seeded ensemble of stochastic Volterra integral paths with per-path
// statistics; everything is recomputable bit-exactly from (seed, grid, spec).
struct PathEnsemble {
  double moment_p = 2.0;
  std::uint64_t seed = 0;
  std::vector<double> sup_abs;   // per path: max_k |I_{t_k}| (grid sup, a lower
                                 // bound for the continuous-time sup)
  std::vector<double> terminal;  // per path: I_T
  McEstimate sup_pow_p;          // E[ (sup |I|)^p ]
};

// MC estimate of E[ sup_k |I_{t_k}|^p ] for I = \int K(t-s) phi(s) dW_s with
// deterministic phi.
inline PathEnsemble sup_moment_estimate(const Kernel& kernel,
                                        const std::function<double(double)>& phi,
                                        const TimeGrid& grid, std::uint64_t seed,
                                        std::size_t paths, double p,
                                        unsigned workers = 0) {
  if (!(p >= 2.0)) throw std::domain_error("sup_moment_estimate: p must be >= 2");
  if (paths < 2) throw std::domain_error("sup_moment_estimate: need at least 2 paths");
  const std::vector<double> kbar = cell_averaged_weights(kernel, grid);
  std::vector<double> phi_vals(grid.steps);
  for (std::size_t j = 0; j < grid.steps; ++j) phi_vals[j] = phi(grid.node(j));

  PathEnsemble ens;
  ens.moment_p = p;
  ens.seed = seed;
  ens.sup_abs.resize(paths);
  ens.terminal.resize(paths);
  parallel_paths(paths, workers, [&](std::size_t i) {
    const BrownianPath bw = sample_brownian(grid, seed, i);
    const std::vector<double> path = volterra_integral_path(kbar, phi_vals, bw);
    double sup = 0.0;
    for (double v : path) sup = std::max(sup, std::abs(v));
    ens.sup_abs[i] = sup;
    ens.terminal[i] = path.back();
  });
  std::vector<double> powered(paths);
  for (std::size_t i = 0; i < paths; ++i) powered[i] = std::pow(ens.sup_abs[i], p);
  ens.sup_pow_p = mc_estimate(powered);
  return ens;
}

// Prefix suprema of |I| at several horizons along one simulation with a
// shared time step: sup over [0, T_h] is monotone in h path by path.
struct MultiHorizonSup {
  std::vector<std::size_t> horizon_steps;
  std::vector<std::vector<double>> sup_abs;  // [horizon][path]
};

inline MultiHorizonSup integral_sup_multi_horizon(
    const Kernel& kernel, const std::function<double(double)>& phi, const TimeGrid& grid,
    std::uint64_t seed, std::size_t paths, std::vector<std::size_t> horizon_steps,
    unsigned workers = 0) {
  for (std::size_t h : horizon_steps)
    if (h > grid.steps)
      throw std::invalid_argument("integral_sup_multi_horizon: horizon beyond grid");
  const std::vector<double> kbar = cell_averaged_weights(kernel, grid);
  std::vector<double> phi_vals(grid.steps);
  for (std::size_t j = 0; j < grid.steps; ++j) phi_vals[j] = phi(grid.node(j));

  MultiHorizonSup out;
  out.horizon_steps = std::move(horizon_steps);
  out.sup_abs.assign(out.horizon_steps.size(), std::vector<double>(paths, 0.0));
  parallel_paths(paths, workers, [&](std::size_t i) {
    const BrownianPath bw = sample_brownian(grid, seed, i);
    const std::vector<double> path = volterra_integral_path(kbar, phi_vals, bw);
    for (std::size_t h = 0; h < out.horizon_steps.size(); ++h) {
      double sup = 0.0;
      for (std::size_t k = 0; k <= out.horizon_steps[h]; ++k)
        sup = std::max(sup, std::abs(path[k]));
      out.sup_abs[h][i] = sup;
    }
  });
  return out;
}

struct CoupledDistance {
  std::vector<double> sup_diff;  // per path: max_k |X_k - Y_k|
  McEstimate dist_pow_p;         // E[ sup^p ] with standard error
};

// Simulates both SVEs on the same Brownian path per path index and estimates
// E[ sup_k |X_k - Y_k|^p ].  Both equations must share x0 and sigma.
inline CoupledDistance coupled_sup_distance(const SveSpec& spec1, const SveSpec& spec2,
                                            const TimeGrid& grid, std::uint64_t seed,
                                            std::size_t paths, double p,
                                            unsigned workers = 0) {
  const std::vector<double> kbar1 = cell_averaged_weights(spec1.kernel, grid);
  const std::vector<double> kbar2 = cell_averaged_weights(spec2.kernel, grid);
  CoupledDistance out;
  out.sup_diff.resize(paths);
  parallel_paths(paths, workers, [&](std::size_t i) {
    const BrownianPath bw = sample_brownian(grid, seed, i);
    const std::vector<double> x = sve_euler(spec1, grid, bw, kbar1);
    const std::vector<double> y = sve_euler(spec2, grid, bw, kbar2);
    double sup = 0.0;
    for (std::size_t k = 0; k <= grid.steps; ++k)
      sup = std::max(sup, std::abs(x[k] - y[k]));
    out.sup_diff[i] = sup;
  });
  std::vector<double> powered(paths);
  for (std::size_t i = 0; i < paths; ++i) powered[i] = std::pow(out.sup_diff[i], p);
  out.dist_pow_p = mc_estimate(powered);
  return out;
}

// Variation-of-constants representation of the linear mean-reverting SVE with
// K(t) = t^{H-1/2}/Gamma(H+1/2):
//   X_t = x0(t) - \int_0^t R(t-s) x0(s) ds + (1/lambda) \int_0^t R(t-s) phi(s) dW_s,
// discretized with cell-averaged resolvent weights.  The deterministic
// convolution is path-independent and precomputed once.
class LinearSveSimulator {
 public:
  LinearSveSimulator(std::function<double(double)> x0, double lambda, double hurst,
                     std::function<double(double)> phi, const TimeGrid& grid,
                     const Kernel& resolvent)
      : grid_(grid), lambda_(lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("LinearSveSimulator: lambda must be > 0");
    (void)hurst;
    const std::size_t n = grid.steps;
    rbar_ = cell_averaged_weights(resolvent, grid);
    phi_.resize(n);
    for (std::size_t j = 0; j < n; ++j) phi_[j] = phi(grid.node(j));
    det_.resize(n + 1);
    const double dt = grid.dt();
    std::vector<double> x0_vals(n + 1);
    for (std::size_t k = 0; k <= n; ++k) x0_vals[k] = x0(grid.node(k));
    for (std::size_t k = 0; k <= n; ++k) {
      double conv = 0.0;
      for (std::size_t j = 0; j < k; ++j) conv += rbar_[k - j] * x0_vals[j];
      det_[k] = x0_vals[k] - conv * dt;
    }
  }

  std::vector<double> path(const BrownianPath& bw) const {
    const std::size_t n = grid_.steps;
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) y[j] = phi_[j] * bw.increments[j];
    std::vector<double> x(n + 1);
    x[0] = det_[0];
    for (std::size_t k = 1; k <= n; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += rbar_[k - j] * y[j];
      x[k] = det_[k] + acc / lambda_;
    }
    return x;
  }

  const std::vector<double>& deterministic_part() const { return det_; }

 private:
  TimeGrid grid_;
  double lambda_;
  std::vector<double> rbar_, phi_, det_;
};

}  // namespace vklab
