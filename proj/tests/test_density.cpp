#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "psidensity/density.hpp"
#include "psidensity/error.hpp"

using namespace psidensity;

namespace {

const double kLn2 = std::numbers::ln2;
const double kPi = std::numbers::pi;
const Domain kHalfLine{0.0, kInf};

PsiScale log_scale() { return PsiScale::make(ScaleKind::log, 1.0, kInf); }
PsiScale lin_scale() { return PsiScale::make(ScaleKind::linear, 1.0, kInf); }

double ratio_at(const IntervalSet& e, const PsiScale& s, double x) {
  return psi_measure(e, s, x) / s.psi_at(x);
}

}  // namespace

TEST(Density, FullDomain) {
  const auto d = estimate_density(IntervalSet::full(kHalfLine), log_scale(), 50.0);
  EXPECT_NEAR(d.upper, 1.0, 1e-12);
  EXPECT_NEAR(d.lower, 1.0, 1e-12);
}

TEST(Density, Geo2) {
  const IntervalSet geo = parse_set("geo2", kHalfLine);
  const auto lg = estimate_density(geo, log_scale(), 81 * kLn2);
  EXPECT_NEAR(lg.upper, 0.5, 1e-2);
  EXPECT_NEAR(lg.lower, 0.5, 1e-2);
  // The last 8 extrema reach back to the maximum at 2^75: 38/75.
  EXPECT_NEAR(lg.upper, 38.0 / 75.0, 1e-12);
  const auto ln = estimate_density(geo, lin_scale(), 81 * kLn2);
  EXPECT_NEAR(ln.upper, 2.0 / 3.0, 1e-2);
  EXPECT_NEAR(ln.lower, 1.0 / 3.0, 1e-2);
  EXPECT_FALSE(lg.low_confidence);
  EXPECT_EQ(lg.tail_window, 8u);
}

TEST(Density, Accel4) {
  const IntervalSet acc = parse_set("accel4", kHalfLine);
  const auto d = estimate_density(acc, log_scale(), std::pow(4.0, 9));
  EXPECT_NEAR(d.upper, 2.0 / 3.0, 1e-2);
  EXPECT_NEAR(d.lower, 1.0 / 3.0, 1e-2);
}

TEST(Density, CutoffStability) {
  for (const char* spec : {"geo2", "accel4"}) {
    const IntervalSet e = parse_set(spec, kHalfLine);
    const double x = std::string(spec) == "geo2" ? 81 * kLn2 : std::pow(4.0, 9);
    const auto a = estimate_density(e, log_scale(), x);
    const auto b = estimate_density(e, log_scale(), 2 * x);
    EXPECT_LT(std::abs(a.upper - b.upper), 5e-3) << spec;
    EXPECT_LT(std::abs(a.lower - b.lower), 5e-3) << spec;
  }
}

TEST(Density, TailWindowAndSparseSets) {
  const IntervalSet geo = parse_set("geo2", kHalfLine);
  EXPECT_THROW(estimate_density(geo, log_scale(), 50.0, 3), PreconditionError);
  const auto one = estimate_density(IntervalSet::from_r(1.0, kInf, {{2.0, 3.0}}), log_scale(), 10.0);
  EXPECT_TRUE(one.low_confidence);
  EXPECT_LE(one.lower, one.upper);
}

TEST(Density, ChainExamples) {
  for (const IntervalSet& e : {parse_set("geo2", kHalfLine), IntervalSet::empty(kHalfLine), IntervalSet::full(kHalfLine)}) {
    const auto reports = check_chain(e, log_scale(), 81 * kLn2);
    ASSERT_EQ(reports.size(), 4u);
    for (const auto& r : reports) EXPECT_TRUE(r.pass) << e.describe() << ": " << r.id;
  }
}

TEST(Density, FiniteMeasureZeroDensity) {
  const IntervalSet thin = parse_set("thin", kHalfLine);
  const auto rep = check_finite_measure_zero_density(thin, log_scale(), {5.0, 10.0, 15.0, 20.0, 21.0});
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(estimate_density(thin, lin_scale(), 20.0).upper, 1e-3);
  const IntervalSet single = IntervalSet::from_r(1.0, kInf, {{2.0, 3.0}});
  EXPECT_TRUE(check_finite_measure_zero_density(single, log_scale(), {5.0, 10.0, 20.0}).pass);
  EXPECT_THROW(check_finite_measure_zero_density(parse_set("geo2", kHalfLine), log_scale(), {40.0, 60.0, 80.0}),
               PreconditionError);
}

TEST(Density, AvoidExceptional) {
  const ScalarFn id("r", [](double r) { return r; }, {});
  const auto same = avoid_exceptional(id, id, IntervalSet::empty(kHalfLine), log_scale(), 2.0, 30.0);
  EXPECT_TRUE(same.report.pass);
  EXPECT_EQ(same.r_prime, 0.0);

  // f jumps ahead to the right end of each geo2 interval and follows r on
  // the gaps, so f <= g = r off E and f > g on E.
  const double period = 2 * kLn2;
  const ScalarFn f("f", {}, [period](double x) {
    const double k = std::floor(x / period);
    const double b = (2 * k + 1) * kLn2;
    return x < b ? std::exp(b) : std::exp(x);
  });
  const IntervalSet geo = parse_set("geo2", kHalfLine);
  const auto res = avoid_exceptional(f, id, geo, log_scale(), 3.0, 60.0);
  EXPECT_TRUE(res.report.pass);
  EXPECT_LT(res.r_prime, 60.0);
  EXPECT_THROW(avoid_exceptional(f, id, geo, log_scale(), 1.5, 60.0), PreconditionError);
}

TEST(Density, ExtractSinLog) {
  const ScalarFn g("sin(log(t))", {}, [](double x) { return std::sin(x); });
  const IntervalSet s = extract_positive(g, kHalfLine, 4 * kPi);
  ASSERT_EQ(s.intervals().size(), 2u);
  EXPECT_NEAR(s.intervals()[0].a, 0.0, 1e-9);
  EXPECT_NEAR(s.intervals()[0].b, kPi, 1e-9 * kPi);
  EXPECT_NEAR(s.intervals()[1].a, 2 * kPi, 1e-9 * 2 * kPi);
  EXPECT_NEAR(s.intervals()[1].b, 3 * kPi, 1e-9 * 3 * kPi);

  EXPECT_EQ(extract_positive(ScalarFn::constant(1.0), kHalfLine, 10.0).intervals(),
            (std::vector<Interval>{{0.0, 10.0}}));
  EXPECT_TRUE(extract_positive(ScalarFn::constant(-1.0), kHalfLine, 10.0).intervals().empty());

  const IntervalSet many = extract_positive(g, kHalfLine, 400 * kPi);
  const auto d = estimate_density(many, log_scale(), 400 * kPi);
  EXPECT_NEAR(d.upper, 0.5, 1e-2);
  EXPECT_NEAR(d.lower, 0.5, 1e-2);
}

TEST(Density, ExtractRefinementIsMonotone) {
  // Narrow bumps: a finer grid never loses a detected interval.
  const ScalarFn g("bumps", {}, [](double x) { return std::sin(40 * x) - 0.99; });
  GridSpec coarse;
  GridSpec fine;
  fine.per_decade = 256;
  const IntervalSet a = extract_positive(g, kHalfLine, 20.0, coarse);
  const IntervalSet b = extract_positive(g, kHalfLine, 20.0, fine);
  EXPECT_GE(b.intervals().size(), a.intervals().size());
  EXPECT_TRUE(combine(a, b, SetOp::difference).intervals().empty() ||
              psi_measure(combine(a, b, SetOp::difference), log_scale(), 20.0) < 1e-8);
}

TEST(DensityProperty, RatioMonotoneOnIntervalsAndGaps) {
  std::mt19937_64 rng(5);
  const PsiScale scales[] = {log_scale(), lin_scale(), PsiScale::make(ScaleKind::powlog, 1.0, kInf, 2.0),
                             PsiScale::make(ScaleKind::loglog, std::numbers::e, kInf)};
  for (int trial = 0; trial < 30; ++trial) {
    for (const PsiScale& s : scales) {
      std::uniform_real_distribution<double> u(s.x0() + 0.5, s.x0() + 14.0);
      std::vector<Interval> iv;
      for (int i = 0; i < 6; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        iv.push_back({a, b});
      }
      const IntervalSet e(Domain::of(s), iv);
      double prev_end = s.x0() + 0.25;
      auto check = [&](double lo, double hi, bool inside) {
        double prev = ratio_at(e, s, lo + (hi - lo) / 11);
        for (int j = 2; j <= 10; ++j) {
          const double cur = ratio_at(e, s, lo + (hi - lo) * j / 11);
          if (inside) {
            EXPECT_GE(cur, prev - 1e-12);
          } else {
            EXPECT_LE(cur, prev + 1e-12);
          }
          prev = cur;
        }
      };
      for (const Interval& i : e.intervals()) {
        if (i.a > prev_end) check(prev_end, i.a, false);
        check(i.a, i.b, true);
        prev_end = i.b;
      }
    }
  }
}

TEST(DensityProperty, ComplementIdentity) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    IntervalSet e = IntervalSet::empty(kHalfLine);
    double x_cutoff = 0.0;
    if (i % 2 == 0) {
      const double q = 2.0 + 8.0 * u01(rng);
      const double theta = 0.2 + 0.6 * u01(rng);
      e = IntervalSet::generated(kHalfLine, geo_rule(q, theta));
      x_cutoff = 200.0;
    } else {
      const double lambda = 3.0 + 3.0 * u01(rng);
      const double c = 1.3 + (lambda - 1.8) * u01(rng);
      e = IntervalSet::generated(kHalfLine, accel_rule(lambda, c));
      x_cutoff = std::pow(lambda, 14);
    }
    for (const PsiScale& s : {log_scale(), lin_scale()}) {
      const auto de = estimate_density(e, s, x_cutoff);
      const auto dc = estimate_density(complement(e), s, x_cutoff);
      EXPECT_NEAR(dc.upper + de.lower, 1.0, 2e-2) << e.describe() << " " << s.name();
      EXPECT_NEAR(dc.lower + de.upper, 1.0, 2e-2) << e.describe() << " " << s.name();
      EXPECT_LE(de.lower, de.upper);
    }
  }
}

TEST(Density, TrajectoryCandidates) {
  const IntervalSet geo = parse_set("geo2", kHalfLine);
  // Cutoff inside a gap: it is the final minimum candidate.
  const auto traj = density_trajectory(geo, log_scale(), 9.5 * kLn2);
  ASSERT_FALSE(traj.empty());
  for (const auto& p : traj) {
    EXPECT_NEAR(p.ratio, ratio_at(geo, log_scale(), p.x), 1e-12);
  }
  EXPECT_FALSE(traj.back().is_max);
  EXPECT_NEAR(traj.back().x, 9.5 * kLn2, 1e-12);
  // Cutoff at the end of an interval: the truncated endpoint is a maximum.
  const auto at_end = density_trajectory(geo, log_scale(), 9 * kLn2);
  EXPECT_TRUE(at_end.back().is_max);
  EXPECT_NEAR(at_end.back().x, 9 * kLn2, 1e-12);
}
