#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "psidensity/error.hpp"
#include "psidensity/interval_set.hpp"

using namespace psidensity;

namespace {

std::vector<std::pair<double, double>> r_intervals(const IntervalSet& s) {
  std::vector<std::pair<double, double>> out;
  for (const Interval& iv : s.intervals()) out.emplace_back(std::exp(iv.a), std::exp(iv.b));
  return out;
}

void expect_intervals(const IntervalSet& s, const std::vector<std::pair<double, double>>& want) {
  const auto got = r_intervals(s);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_NEAR(got[i].first, want[i].first, 1e-12 * want[i].first);
    EXPECT_NEAR(got[i].second, want[i].second, 1e-12 * want[i].second);
  }
}

IntervalSet random_set(std::mt19937_64& rng, double R) {
  std::uniform_real_distribution<double> u(1.0, R);
  std::vector<std::pair<double, double>> iv;
  const int n = std::uniform_int_distribution<int>(0, 8)(rng);
  for (int i = 0; i < n; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    iv.emplace_back(a, b);
  }
  return IntervalSet::from_r(1.0, kInf, iv);
}

}  // namespace

TEST(IntervalSet, ComplementExample) {
  const IntervalSet a = IntervalSet::from_r(1.0, 10.0, {{2.0, 3.0}});
  expect_intervals(complement(a), {{1.0, 2.0}, {3.0, 10.0}});
}

TEST(IntervalSet, UnionMergesOverlap) {
  const IntervalSet a = IntervalSet::from_r(1.0, kInf, {{1.0, 3.0}});
  const IntervalSet b = IntervalSet::from_r(1.0, kInf, {{2.0, 5.0}});
  expect_intervals(combine(a, b, SetOp::set_union), {{1.0, 5.0}});
}

TEST(IntervalSet, GeneratedIntersection) {
  const Domain d{0.0, kInf};
  const IntervalSet geo = parse_set("geo2", d);
  const IntervalSet box = IntervalSet::from_r(1.0, kInf, {{1.0, 100.0}});
  const IntervalSet cut = combine(geo, box, SetOp::intersection).materialize(std::log(1000.0));
  // geo2 starts with [1, 2); intersected with (1, 100).
  expect_intervals(cut, {{1.0, 2.0}, {4.0, 8.0}, {16.0, 32.0}, {64.0, 100.0}});
}

TEST(IntervalSet, NormalizationAndDomain) {
  const IntervalSet s = IntervalSet::from_r(1.0, kInf, {{5.0, 8.0}, {2.0, 3.0}, {3.0, 4.0}, {6.0, 6.0}});
  expect_intervals(s, {{2.0, 4.0}, {5.0, 8.0}});
  EXPECT_THROW(IntervalSet::from_r(1.0, 10.0, {{5.0, 20.0}}), DomainError);
  const IntervalSet other = IntervalSet::from_r(2.0, 10.0, {{3.0, 4.0}});
  EXPECT_THROW(combine(s, other, SetOp::set_union), Error);
  EXPECT_TRUE(s.contains(std::log(2.0)));
  EXPECT_FALSE(s.contains(std::log(4.0)));
}

TEST(IntervalSet, PsiMeasureExamples) {
  const PsiScale log = PsiScale::make(ScaleKind::log, 1.0, kInf);
  const PsiScale lin = PsiScale::make(ScaleKind::linear, 1.0, kInf);
  const IntervalSet e = IntervalSet::from_r(1.0, kInf, {{std::exp(1.0), std::exp(2.0)}});
  EXPECT_NEAR(psi_measure(e, log, 3.0), 1.0, 1e-12);
  const IntervalSet geo = parse_set("geo2", Domain{0.0, kInf});
  // [1,2) + [4,8) + [16,32) + [64,128): 1 + 4 + 16 + 64.
  EXPECT_NEAR(psi_measure(geo, lin, std::log(128.0)), 85.0, 1e-9);
  for (const PsiScale& s : {log, lin}) {
    EXPECT_EQ(psi_measure(IntervalSet::empty(Domain{0.0, kInf}), s, 10.0), 0.0);
  }
  EXPECT_EQ(log_psi_measure(IntervalSet::empty(Domain{0.0, kInf}), log, 10.0), -kInf);
}

TEST(IntervalSet, GeneratedSetsAtHugeCutoff) {
  const PsiScale log = PsiScale::make(ScaleKind::log, 1.0, kInf);
  const IntervalSet accel = parse_set("accel4", Domain{0.0, kInf});
  // Intervals [4^k, 2 4^k) in x: measure up to 2*4^8 is sum 4^k = (4^9 - 1)/3.
  EXPECT_NEAR(psi_measure(accel, log, 2.0 * std::pow(4.0, 8)), (std::pow(4.0, 9) - 1) / 3, 1e-6);
  const IntervalSet m1 = accel.materialize(100.0);
  const IntervalSet m2 = accel.materialize(1000.0);
  EXPECT_EQ(m1.intervals(), accel.materialize(100.0).intervals());
  EXPECT_TRUE(combine(m1, m2, SetOp::difference).intervals().empty());
}

TEST(IntervalSetProperty, InclusionExclusionAndComplement) {
  std::mt19937_64 rng(3);
  const PsiScale scales[] = {PsiScale::make(ScaleKind::log, 1.0, kInf), PsiScale::make(ScaleKind::linear, 1.0, kInf),
                             PsiScale::make(ScaleKind::powlog, 1.0, kInf, 2.0)};
  for (int i = 0; i < 200; ++i) {
    const IntervalSet a = random_set(rng, 50.0);
    const IntervalSet b = random_set(rng, 50.0);
    const double upto = std::log(60.0);
    for (const PsiScale& s : scales) {
      const double lhs = psi_measure(combine(a, b, SetOp::set_union), s, upto) +
                         psi_measure(combine(a, b, SetOp::intersection), s, upto);
      const double rhs = psi_measure(a, s, upto) + psi_measure(b, s, upto);
      EXPECT_NEAR(lhs, rhs, 1e-9);
      const double total = s.psi_at(upto) - s.psi_at(0.0);
      EXPECT_NEAR(psi_measure(complement(a), s, upto), total - psi_measure(a, s, upto), 1e-9);
    }
  }
}

TEST(IntervalSet, ParseSetSyntax) {
  const Domain d{0.0, kInf};
  expect_intervals(parse_set("2:3,5:8", d), {{2.0, 3.0}, {5.0, 8.0}});
  expect_intervals(parse_set("2:3|2.5:4", d), {{2.0, 4.0}});
  EXPECT_TRUE(parse_set("geo:4,0.5", d).is_generated());
  EXPECT_THROW(parse_set("nonsense", d), Error);
  EXPECT_THROW(parse_set("3:2", d), Error);
}
