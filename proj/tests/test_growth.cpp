#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "psidensity/error.hpp"
#include "psidensity/growth.hpp"

using namespace psidensity;

TEST(Growth, PowerFunctionOrders) {
  const GrowthFunction T = GrowthFunction::parse("t^3");
  const OrderEstimate o = estimate_orders(T, 1e4);
  EXPECT_NEAR(o.upper_order, 3.0, 1e-9);
  EXPECT_NEAR(o.lower_order, 3.0, 1e-9);
  EXPECT_FALSE(o.upper_infinite);
}

TEST(Growth, ExponentialHasInfiniteOrder) {
  const OrderEstimate o = estimate_orders(GrowthFunction::parse("exp(t)"), 1e3);
  EXPECT_TRUE(o.upper_infinite);
  EXPECT_TRUE(o.lower_infinite);
  EXPECT_EQ(o.upper_order, kInf);
  EXPECT_GT(o.ratio_at_cutoff, 1e20);
}

TEST(Growth, NonMonotoneRejected) {
  EXPECT_THROW(estimate_orders(GrowthFunction::parse("1/t"), 100.0), PreconditionError);
  EXPECT_THROW(estimate_orders(GrowthFunction::parse("t^2*(1.1+sin(log(t)))"), 100.0), PreconditionError);
  EXPECT_THROW(estimate_orders(GrowthFunction::parse("t^2"), 100.0, 3), PreconditionError);
}

TEST(Growth, TypeExamples) {
  EXPECT_NEAR(estimate_type(GrowthFunction::parse("5*t^2"), 2.0, 100.0), 5.0, 1e-9);
  EXPECT_NEAR(estimate_type(GrowthFunction::parse("t^2*(2+sin(log(t)))"), 2.0, 300.0), 3.0, 1e-2);
  EXPECT_NEAR(estimate_type(GrowthFunction::parse("t"), 2.0, 100.0), 0.0, 1e-12);
  EXPECT_THROW(estimate_type(GrowthFunction::parse("t"), 0.0, 100.0), PreconditionError);
}

TEST(Zigzag, FirstBreakpoints) {
  const GrowthFunction z = make_zigzag(1.0, 3.0, 1.0, 1.0);
  const auto& bp = z.zigzag()->breakpoints;
  ASSERT_GE(bp.size(), 3u);
  EXPECT_DOUBLE_EQ(bp[0].first, 1.0);
  EXPECT_DOUBLE_EQ(bp[1].first, 4.0);
  EXPECT_DOUBLE_EQ(bp[1].second / bp[1].first, 2.5);
  // Flat until the ratio is back to 1.
  EXPECT_DOUBLE_EQ(bp[2].first, 10.0);
  EXPECT_DOUBLE_EQ(bp[2].second, 10.0);
  EXPECT_THROW(make_zigzag(2.0, 2.0), PreconditionError);
  EXPECT_THROW(make_zigzag(0.0, 2.0), PreconditionError);
}

TEST(Zigzag, BreakpointsExactAndMonotone) {
  const GrowthFunction z = make_zigzag(1.0, 3.0);
  const auto& m = *z.zigzag();
  const auto delta = default_delta(1.0, 3.0);
  for (std::size_t i = 0; i < m.breakpoints.size(); ++i) {
    const auto [x, y] = m.breakpoints[i];
    EXPECT_EQ(z.log_value(x), y);
    EXPECT_TRUE(m.slopes[i] == 0.0 || m.slopes[i] == 3.0);
    if (i + 1 < m.breakpoints.size()) {
      EXPECT_LT(x, m.breakpoints[i + 1].first);
      EXPECT_LE(y, m.breakpoints[i + 1].second);
    }
    if (i > 0) {
      const double ratio = y / x;
      if (m.slopes[i - 1] == 0.0) {
        EXPECT_NEAR(ratio, 1.0, 1e-12);
      } else {
        EXPECT_NEAR(ratio, 3.0 - delta(static_cast<int>((i + 1) / 2)), 1e-12);
      }
    }
  }
  EXPECT_NO_THROW(z.check_monotone(1.0, 1e6, 5000));
}

TEST(Zigzag, RecoversOrdersAtHorizon) {
  // Default delta shrinks like 1/n while breakpoints grow factorially.
  const OrderEstimate o = estimate_orders(make_zigzag(1.0, 3.0), 1e150);
  EXPECT_NEAR(o.upper_order, 3.0, 2e-2);
  EXPECT_NEAR(o.lower_order, 1.0, 2e-2);

  const GrowthFunction fast = make_zigzag(1.0, 3.0, 1.0, std::numeric_limits<double>::quiet_NaN(), [](int n) { return 0.01 / n; });
  const OrderEstimate f = estimate_orders(fast, 1e4);
  EXPECT_NEAR(f.upper_order, 3.0, 2e-2);
  EXPECT_NEAR(f.lower_order, 1.0, 2e-2);
}

TEST(Zigzag, UnboundedVariant) {
  const GrowthFunction z = make_zigzag_unbounded(1.0);
  const OrderEstimate o = estimate_orders(z, 1e100);
  EXPECT_TRUE(o.upper_infinite);
  EXPECT_NEAR(o.lower_order, 1.0, 1e-9);
  EXPECT_TRUE(GrowthFunction::parse("zigzag:1,inf").zigzag().has_value());
}

TEST(ZigzagProperty, RandomPairsRecovered) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.2, 8.0);
  for (int i = 0; i < 20; ++i) {
    double ell = u(rng), L = u(rng);
    if (ell > L) std::swap(ell, L);
    if (L - ell < 1e-3) L = ell + 0.5;
    const OrderEstimate o = estimate_orders(make_zigzag(ell, L), 1e300);
    EXPECT_NEAR(o.upper_order, L, 2e-2) << ell << "," << L;
    EXPECT_NEAR(o.lower_order, ell, 2e-2) << ell << "," << L;
    EXPECT_LE(o.lower_order, o.upper_order);
  }
}

TEST(ZigzagProperty, PowerEquivariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.2, 8.0);
  for (int i = 0; i < 5; ++i) {
    double ell = u(rng), L = u(rng);
    if (ell > L) std::swap(ell, L);
    const GrowthFunction z = make_zigzag(ell, L);
    const OrderEstimate a = estimate_orders(z, 1e200);
    const OrderEstimate b = estimate_orders(z.power(2.0), 1e200);
    EXPECT_NEAR(b.upper_order, 2 * a.upper_order, 1e-9 * a.upper_order);
    EXPECT_NEAR(b.lower_order, 2 * a.lower_order, 1e-9 * a.lower_order);
  }
  const OrderEstimate c = estimate_orders(GrowthFunction::parse("t^3").power(2.0), 1e4);
  EXPECT_NEAR(c.upper_order, 6.0, 1e-9);
}

TEST(Growth, LocalExtremaRefined) {
  // Maxima of sin at pi/2 + 2 pi k inside (1, 20].
  const auto ex = local_extrema([](double x) { return std::sin(x); }, 1.0, 20.0);
  int maxima = 0;
  for (const auto& e : ex) {
    if (e.is_max && e.x < 20.0) {
      ++maxima;
      EXPECT_NEAR(e.value, 1.0, 1e-10);
    }
  }
  EXPECT_EQ(maxima, 3);
}
