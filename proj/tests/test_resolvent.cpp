#include "vklab/resolvent.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace vklab;

TEST(ResolventKernel, ConstantKernelLimit) {
  // H = 1/2: K == 1 and the resolvent of lambda K is lambda e^{-lambda t};
  // the defining identity holds exactly:
  //   lambda - lambda e^{-lambda t} = lambda int_0^t lambda e^{-lambda s} ds.
  const Kernel r = resolvent_kernel(2.0, 0.5);
  EXPECT_NEAR(r.eval(1.0), 2.0 * std::exp(-2.0), 1e-15);
  const Kernel one = Kernel::exponential(0.0);
  const double residual = resolvent_residual(one, 2.0, r, TimeGrid(1.0, 1 << 12));
  EXPECT_LT(residual, 5e-4);
}

TEST(ResolventKernel, SmallTimeLeadingTerm) {
  // R(t) t^{1/2-H} -> lambda / Gamma(H+1/2) as t -> 0
  const Kernel r = resolvent_kernel(1.0, 0.3);
  const double limit = 1.0 / gamma_fn(0.8);
  EXPECT_NEAR(r.eval(1e-8) * std::pow(1e-8, 0.2), limit, 1e-6);
}

TEST(ResolventKernel, SeriesOracleValue) {
  const Kernel r = resolvent_kernel(1.0, 0.3);
  const double ref = static_cast<double>(oracles::ml_series_200(0.8, 0.8, -1.0));
  EXPECT_NEAR(r.eval(1.0), ref, 1e-12);
}

TEST(ResolventResidual, ZeroResolventGivesLambda) {
  // R == 0 violates the identity by exactly lambda K(t) at every node.
  const Kernel one = Kernel::exponential(0.0);
  const Kernel zeroish = Kernel::finite_atomic({0.0}, {1e-300});
  const double residual = resolvent_residual(one, 1.0, zeroish, TimeGrid(1.0, 64));
  EXPECT_NEAR(residual, 1.0, 1e-12);
}

TEST(ResolventResidual, ConstantKernelStaysBelowTolerance) {
  // For K == 1 the cell-averaged convolution integrates R exactly, so the
  // defect sits at rounding level on every grid (well below the 5e-4 target
  // and trivially non-increasing under refinement).
  const Kernel one = Kernel::exponential(0.0);
  const Kernel r = resolvent_kernel(1.0, 0.5);
  for (std::size_t steps : {1u << 10, 1u << 11, 1u << 12}) {
    const double res = resolvent_residual(one, 1.0, r, TimeGrid(1.0, steps));
    EXPECT_LT(res, 5e-4);
    EXPECT_LT(res, 1e-12);
  }
}

TEST(ResolventResidual, PowerLawRefinement) {
  // K = t^{H-1/2}/Gamma(H+1/2), R = resolvent: residual is pure
  // discretization error and at least halves under each grid doubling.
  const double hurst = 0.3;
  const Kernel k = Kernel::power_law(hurst, 1.0 / gamma_fn(hurst + 0.5));
  const Kernel r = resolvent_kernel(1.0, hurst);
  double prev = -1.0;
  for (std::size_t steps : {1u << 8, 1u << 9, 1u << 10}) {
    const double res = resolvent_residual(k, 1.0, r, TimeGrid(1.0, steps));
    if (prev > 0.0) {
      EXPECT_LT(res, prev / 1.8);
    }
    prev = res;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(ResolventKernel, NumericallyCompletelyMonotone) {
  EXPECT_TRUE(numerically_completely_monotone(resolvent_kernel(1.0, 0.3)));
  EXPECT_TRUE(numerically_completely_monotone(resolvent_kernel(2.0, 0.45)));
}

TEST(ResolventKernel, DomainValidation) {
  EXPECT_THROW(resolvent_kernel(0.0, 0.3), std::domain_error);
  EXPECT_THROW(resolvent_kernel(1.0, 0.6), std::domain_error);
}
