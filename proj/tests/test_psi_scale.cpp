#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "psidensity/error.hpp"
#include "psidensity/psi_scale.hpp"

using namespace psidensity;

namespace {

const double kE = std::numbers::e;

std::vector<PsiScale> builtin_scales() {
  return {
      PsiScale::make(ScaleKind::linear, 1.0, kInf),
      PsiScale::make(ScaleKind::log, 1.0, kInf),
      PsiScale::make(ScaleKind::loglog, kE, kInf),
      PsiScale::make(ScaleKind::powlog, 1.0, kInf, 2.0),
      PsiScale::make(ScaleKind::powlog, 1.0, kInf, 0.5),
      PsiScale::make(ScaleKind::neglog1m, 0.5, 1.0),
      PsiScale::make(ScaleKind::linear, 1.0, kInf).exp_lift(),
      PsiScale::make(ScaleKind::log, 1.0, kInf).exp_lift(),
      PsiScale::make(ScaleKind::loglog, kE, kInf).exp_lift(),
  };
}

// Random points inside the domain, spread over several decades.
std::vector<double> domain_points(const PsiScale& s, std::mt19937_64& rng, int n) {
  std::vector<double> r;
  if (s.R() == 1.0) {
    std::uniform_real_distribution<double> u(0.0, 8.0);
    for (int i = 0; i < n; ++i) r.push_back(1.0 - (1.0 - s.r0()) * std::pow(10.0, -u(rng)));
  } else {
    // exp:linear overflows a double past r = 709.
    const double hi = s.lifted() ? 2.75 : 8.0;
    std::uniform_real_distribution<double> u(0.001, hi);
    for (int i = 0; i < n; ++i) r.push_back(s.r0() * std::pow(10.0, u(rng)));
  }
  return r;
}

}  // namespace

TEST(PsiScale, MakeValidatesDomains) {
  EXPECT_NO_THROW(PsiScale::make(ScaleKind::log, 1.0, kInf));
  EXPECT_NO_THROW(PsiScale::make(ScaleKind::neglog1m, 0.5, 1.0));
  EXPECT_THROW(PsiScale::make(ScaleKind::loglog, 1.0, kInf), DomainError);
  EXPECT_THROW(PsiScale::make(ScaleKind::neglog1m, 0.5, kInf), DomainError);
  EXPECT_THROW(PsiScale::make(ScaleKind::powlog, 1.0, kInf, 0.0), DomainError);
  EXPECT_THROW(PsiScale::make(ScaleKind::powlog, 1.0, kInf, -1.0), DomainError);
  EXPECT_THROW(PsiScale::make(ScaleKind::linear, 2.0, 1.0), DomainError);
  EXPECT_THROW(PsiScale::make(ScaleKind::linear, 0.0, kInf), DomainError);
  EXPECT_THROW(PsiScale::make(ScaleKind::log, 1.0, kInf).exp_lift().exp_lift(), PreconditionError);
}

TEST(PsiScale, Examples) {
  const PsiScale log = PsiScale::make(ScaleKind::log, 1.0, kInf);
  EXPECT_NEAR(log.forward(kE), 1.0, 1e-15);
  EXPECT_NEAR(log.inverse(2.0 * log.forward(10.0)), 100.0, 1e-12);
  const PsiScale loglog = PsiScale::make(ScaleKind::loglog, kE, kInf);
  // 1/(e^e e) from mpmath.
  EXPECT_NEAR(loglog.derivative(std::exp(kE)), 0.0242756417507746807, 1e-15);
  const PsiScale lifted = log.exp_lift();
  EXPECT_NEAR(lifted.forward(10.0), 10.0, 1e-13);
  EXPECT_NEAR(lifted.inverse(7.0), 7.0, 1e-13);
  EXPECT_NEAR(PsiScale::make(ScaleKind::linear, 1.0, kInf).exp_lift().forward(3.0), 20.085536923187668, 1e-12);
}

TEST(PsiScale, OutOfDomainThrows) {
  const PsiScale log = PsiScale::make(ScaleKind::log, 1.0, kInf);
  EXPECT_THROW(log.forward(0.5), DomainError);
  EXPECT_THROW(log.inverse(-1.0), DomainError);
  const PsiScale disc = PsiScale::make(ScaleKind::neglog1m, 0.5, 1.0);
  EXPECT_THROW(disc.forward(1.5), DomainError);
}

TEST(PsiScale, NamesAndParsing) {
  EXPECT_EQ(parse_scale("log").name(), "log");
  EXPECT_EQ(parse_scale("powlog:2").beta(), 2.0);
  EXPECT_TRUE(parse_scale("exp:log").lifted());
  EXPECT_EQ(parse_scale("loglog").r0(), kE);
  EXPECT_EQ(parse_scale("neglog1m").R(), 1.0);
  EXPECT_THROW(parse_scale("cubic"), Error);
}

TEST(PsiScaleProperty, MonotoneInverseDerivative) {
  std::mt19937_64 rng(7);
  for (const PsiScale& s : builtin_scales()) {
    SCOPED_TRACE(s.name());
    auto r = domain_points(s, rng, 100);
    std::sort(r.begin(), r.end());
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double v = s.forward(r[i]);
      if (i > 0 && r[i] > r[i - 1]) {
        EXPECT_LT(s.forward(r[i - 1]), v);
      }
      EXPECT_NEAR(s.inverse(v), r[i], 1e-10 * r[i]);
      const double d = s.derivative(r[i]);
      EXPECT_GT(d, 0.0);
      const double h0 = 1e-5 * std::min(r[i] - s.r0(), s.R() == 1.0 ? 1.0 - r[i] : r[i]);
      // Five-point stencil with a step exactly representable around r.
      const double h = (r[i] + h0) - r[i];
      const double fd = (8 * (s.forward(r[i] + h) - s.forward(r[i] - h)) -
                         (s.forward(r[i] + 2 * h) - s.forward(r[i] - 2 * h))) /
                        (12 * h);
      EXPECT_NEAR(fd, d, 1e-6 * d) << "r=" << r[i];
      // The log-coordinate API agrees with the r API.
      EXPECT_NEAR(s.psi_at(std::log(r[i])), v, 1e-12 * std::abs(v) + 1e-300);
    }
  }
}

TEST(PsiScaleProperty, UnboundedNearR) {
  for (const PsiScale& s : builtin_scales()) {
    SCOPED_TRACE(s.name());
    const double x_far = s.R() == 1.0 ? std::log1p(-1e-300) : 700.0;
    EXPECT_GT(s.log_psi_at(x_far), std::log(5.0));
    if (s.R() != 1.0) {
      double prev = -kInf;
      // Lifted scales have log psi of order e^x, finite only up to x = 709.
      const std::vector<double> xs =
          s.lifted() ? std::vector<double>{1.0, 10.0, 100.0, 700.0} : std::vector<double>{10.0, 1e3, 1e6, 1e12, 1e100};
      for (double x : xs) {
        const double lp = s.log_psi_at(x);
        EXPECT_GT(lp, prev);
        prev = lp;
      }
    }
  }
}

TEST(PsiScaleProperty, LiftOfLogIsLinear) {
  const PsiScale lin = PsiScale::make(ScaleKind::linear, 1.0, kInf);
  const PsiScale lifted = PsiScale::make(ScaleKind::log, 1.0, kInf).exp_lift();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 12.0);
  for (int i = 0; i < 100; ++i) {
    const double r = std::pow(10.0, u(rng));
    EXPECT_NEAR(lifted.forward(r), lin.forward(r), 1e-12 * r);
    EXPECT_NEAR(lifted.derivative(r), lin.derivative(r), 1e-12);
    EXPECT_NEAR(lifted.inverse(r), lin.inverse(r), 1e-12 * r);
  }
}

TEST(PsiScale, LogCoordinateHugeX) {
  const PsiScale log = PsiScale::make(ScaleKind::log, 1.0, kInf);
  EXPECT_NEAR(log.log_psi_at(1e12), std::log(1e12), 1e-12);
  // log(2e12) carries a relative rounding error of about 1e-16 * 28.
  EXPECT_NEAR(log.inverse_log(std::log(2e12)), 2e12, 1e-14 * 2e12);
  const PsiScale lin = PsiScale::make(ScaleKind::linear, 1.0, kInf);
  EXPECT_NEAR(lin.log_psi_at(1e6), 1e6, 1e-6);
  // log(psi(e^b) - psi(e^a)) for the log scale is log(b - a).
  EXPECT_NEAR(log.log_psi_diff(1e12, 1e12 + 3), std::log(3.0), 1e-3);
  EXPECT_NEAR(lin.log_psi_diff(1e6, 1e6 + 1), 1e6 + 1 + std::log1p(-std::exp(-1.0)), 1e-6);
}
