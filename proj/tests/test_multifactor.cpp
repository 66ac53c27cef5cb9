#include "vklab/multifactor.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vklab/serialize.hpp"

using namespace vklab;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST(Discretize, AtomicMeasureReproducedExactly) {
  BernsteinMeasure mu;
  mu.add_atom(3.0, 2.0);
  const MultifactorScheme s = discretize_measure(mu, 10.0, 5, NodeRule::centroid);
  ASSERT_EQ(s.factor_count(), 1u);  // only the cell [2, 4) is nonempty
  EXPECT_DOUBLE_EQ(s.weights[0], 2.0);
  EXPECT_DOUBLE_EQ(s.nodes[0], 3.0);
}

TEST(Discretize, MassConservation) {
  const Kernel pl = Kernel::power_law(0.3);
  for (NodeRule rule : {NodeRule::left, NodeRule::midpoint, NodeRule::centroid}) {
    const MultifactorScheme s = discretize_measure(pl.measure(), 10.0, 10, rule);
    EXPECT_NEAR(s.total_mass() / pl.measure().mass(0.0, 10.0), 1.0, 1e-8);
  }
}

TEST(Discretize, DegenerateSingleCell) {
  const Kernel pl = Kernel::power_law(0.3);
  const MultifactorScheme s = discretize_measure(pl.measure(), 10.0, 1, NodeRule::left);
  ASSERT_EQ(s.factor_count(), 1u);
  EXPECT_DOUBLE_EQ(s.nodes[0], 0.0);
  EXPECT_NEAR(s.weights[0], pl.measure().mass(0.0, 10.0), 1e-9);
  // left node at zero makes the approximation constant in t
  const Kernel khat = multifactor_kernel(s);
  EXPECT_DOUBLE_EQ(khat.eval(0.5), khat.eval(3.0));
}

TEST(Discretize, NodesStayInTheirCells) {
  const Kernel gk = Kernel::gamma_kernel(1.0, 0.3);
  for (NodeRule rule : {NodeRule::left, NodeRule::midpoint, NodeRule::centroid}) {
    const MultifactorScheme s = discretize_measure(gk.measure(), 20.0, 16, rule);
    const double cell = 20.0 / 16.0;
    for (std::size_t i = 0; i < s.factor_count(); ++i) {
      const double idx = std::floor(s.nodes[i] / cell);
      EXPECT_GE(s.nodes[i], idx * cell);
      EXPECT_LT(s.nodes[i], (idx + 1.0) * cell);
    }
  }
}

TEST(Discretize, EmptySchemeError) {
  BernsteinMeasure mu;
  mu.add_atom(50.0, 1.0);
  EXPECT_THROW(discretize_measure(mu, 10.0, 4), std::domain_error);
}

TEST(MultifactorKernel, FiniteSums) {
  const Kernel one = multifactor_kernel({10.0, 1, NodeRule::left, {0.0}, {1.0}});
  EXPECT_DOUBLE_EQ(one.eval(0.123), 1.0);
  const Kernel two = multifactor_kernel({10.0, 2, NodeRule::left, {1.0, 2.0}, {0.5, 0.5}});
  EXPECT_NEAR(two.eval(1.0), 0.5 * (std::exp(-1.0) + std::exp(-2.0)), 1e-15);
}

TEST(MultifactorKernel, PointwiseGapBound) {
  // |K^N(t) - K_hat(t)| <= t mu([0,N)) N/n for any node rule.
  const Kernel pl = Kernel::power_law(0.3);
  const double cap = 50.0;
  const Kernel truncated = pl.truncated(cap);
  const double mass = pl.measure().mass(0.0, cap);
  for (NodeRule rule : {NodeRule::left, NodeRule::midpoint, NodeRule::centroid}) {
    const MultifactorScheme s = discretize_measure(pl.measure(), cap, 500, rule);
    const Kernel khat = multifactor_kernel(s);
    for (double t : {0.1, 0.5, 1.0}) {
      const double gap = std::abs(truncated.eval(t) - khat.eval(t));
      EXPECT_LE(gap, t * mass * cap / 500.0 + 1e-9);
    }
  }
}

TEST(MultifactorKernel, MonotoneImprovement) {
  const Kernel pl = Kernel::power_law(0.3);
  const double cap = 20.0;
  const Kernel truncated = pl.truncated(cap);
  const std::vector<double> ts = log_spaced(0.05, 1.0, 12);
  std::vector<double> reference(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) reference[i] = truncated.eval(ts[i]);
  double prev = kInf;
  for (std::size_t n : {10u, 20u, 40u, 80u}) {
    const Kernel khat = multifactor_kernel(discretize_measure(pl.measure(), cap, n, NodeRule::left));
    double sup = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
      sup = std::max(sup, std::abs(khat.eval(ts[i]) - reference[i]));
    EXPECT_LE(sup, prev * (1.0 + 1e-12));
    prev = sup;
  }
}

TEST(MultifactorKernel, CentroidExactForAtomicMeasures) {
  BernsteinMeasure mu;
  mu.add_atom(0.7, 0.4);
  mu.add_atom(3.1, 1.1);
  mu.add_atom(7.9, 0.2);
  const MultifactorScheme s = discretize_measure(mu, 10.0, 5, NodeRule::centroid);
  const Kernel khat = multifactor_kernel(s);
  const Kernel exact = Kernel::finite_atomic({0.7, 3.1, 7.9}, {0.4, 1.1, 0.2});
  for (double t : {0.2, 1.0, 4.0}) EXPECT_NEAR(khat.eval(t), exact.eval(t), 1e-14);
}

TEST(TruncationBound, Examples) {
  BernsteinMeasure atom;
  atom.add_atom(3.0, 1.0);
  EXPECT_DOUBLE_EQ(truncation_error_bound(atom, 10.0, 4.0).value(), 0.0);

  // power-law measure: the bound is exactly C_mu N^{delta-H}/(H-delta)
  const Kernel pl = Kernel::power_law(0.3);
  const double delta = 0.2;
  const double gamma_exp = 2.0 / (1.0 - 2.0 * delta);
  const double got = truncation_error_bound(pl.measure(), 100.0, gamma_exp).value();
  const double want =
      truncation_error_power_law(1.0 / gamma_fn(0.2), 0.3, delta, 100.0);
  EXPECT_NEAR(got / want, 1.0, 1e-8);

  // vanishing tail as N grows: each decade shaves the factor 10^{delta-H}
  double first = 0.0, prev = kInf;
  for (double cap : {10.0, 100.0, 1000.0, 10000.0}) {
    const double v = truncation_error_bound(pl.measure(), cap, gamma_exp).value();
    EXPECT_LT(v, prev);
    if (first == 0.0) first = v;
    prev = v;
  }
  EXPECT_NEAR(prev / first, std::pow(10.0, 3.0 * (delta - 0.3)), 1e-6);
}

TEST(DiscretizationBound, Examples) {
  BernsteinMeasure mu;
  mu.add_atom(1.0, 2.0);
  EXPECT_DOUBLE_EQ(discretization_error_bound(mu, 10.0, 100), 0.2);
  EXPECT_DOUBLE_EQ(discretization_error_bound(mu, 10.0, 200),
                   0.5 * discretization_error_bound(mu, 10.0, 100));

  // power-law cell mass has closed form N^{1/2-H}/((1/2-H) Gamma(1/2-H))
  const Kernel pl = Kernel::power_law(0.3);
  const double mass = std::pow(10.0, 0.2) / (0.2 * gamma_fn(0.2));
  EXPECT_NEAR(discretization_error_bound(pl.measure(), 10.0, 50), mass * 10.0 / 50.0, 1e-8);
}

TEST(Scheme, JsonRoundTrip) {
  const Kernel gk = Kernel::gamma_kernel(1.0, 0.3);
  const MultifactorScheme s = discretize_measure(gk.measure(), 15.0, 12, NodeRule::centroid);
  const MultifactorScheme back = scheme_from_json(scheme_to_json(s));
  EXPECT_EQ(back.nodes, s.nodes);
  EXPECT_EQ(back.weights, s.weights);
  EXPECT_DOUBLE_EQ(back.truncation, s.truncation);
  const Kernel k1 = multifactor_kernel(s);
  const Kernel k2 = multifactor_kernel(back);
  for (double t : {0.1, 1.0, 5.0}) EXPECT_DOUBLE_EQ(k1.eval(t), k2.eval(t));
}

TEST(TruncationBound, DivergentTailFlag) {
  // theta = -1/gamma > tail exponent - 1 makes the tail moment diverge:
  // for H = 0.3 the tail needs 1/gamma + H - 1/2 > 0, i.e. gamma < 5.
  const Kernel pl = Kernel::power_law(0.3);
  EXPECT_TRUE(truncation_error_bound(pl.measure(), 10.0, 6.0).is_infinite());
  EXPECT_TRUE(truncation_error_bound(pl.measure(), 10.0, 4.0).is_finite());
}
