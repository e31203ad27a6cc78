#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "psidensity/bounds.hpp"
#include "psidensity/error.hpp"

using namespace psidensity;

namespace {

const BoundReport* find(const std::vector<BoundReport>& reports, const std::string& prefix) {
  for (const auto& r : reports)
    if (r.id.rfind(prefix, 0) == 0) return &r;
  return nullptr;
}

int count_prefix(const std::vector<BoundReport>& reports, const std::string& prefix) {
  int n = 0;
  for (const auto& r : reports) n += r.id.rfind(prefix, 0) == 0;
  return n;
}

LimitSetSpec zigzag_spec(double ell, double L) {
  LimitSetSpec spec;
  spec.phi = order_ratio(make_zigzag(ell, L));
  spec.K = L;
  spec.k = ell;
  spec.eps = 0.5;
  return spec;
}

}  // namespace

TEST(Reports, PassFollowsRelationAndSlack) {
  EXPECT_TRUE(make_report("a", 0.49, Relation::ge, 0.5, 2e-2).pass);
  EXPECT_FALSE(make_report("a", 0.47, Relation::ge, 0.5, 2e-2).pass);
  EXPECT_TRUE(make_report("a", 0.51, Relation::le, 0.5, 2e-2).pass);
  EXPECT_FALSE(make_report("a", 0.53, Relation::le, 0.5, 2e-2).pass);
  EXPECT_TRUE(make_report("a", 0.51, Relation::eq, 0.5, 2e-2).pass);
  EXPECT_FALSE(make_report("a", 0.48, Relation::eq, 0.5, 1e-2).pass);
  const BoundReport na = inapplicable("x", "premise");
  EXPECT_FALSE(na.pass);
  EXPECT_FALSE(na.applicable);
}

TEST(LimsupSets, ZigzagLevelSetBounds) {
  const auto reports = verify_limsup_sets(zigzag_spec(1.0, 3.0), 1e12);
  EXPECT_EQ(count_prefix(reports, "thm3.1"), 8);
  EXPECT_EQ(count_prefix(reports, "prop3.2"), 4);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.applicable) << r.id;
    if (r.id.rfind("thm3.1", 0) == 0) EXPECT_TRUE(r.pass) << r.id << " measured " << r.measured;
  }
  const BoundReport* f = find(reports, "thm3.1: upper log density of F_eps");
  ASSERT_NE(f, nullptr);
  EXPECT_NEAR(f->bound, 0.5 / 3.0, 1e-15);
  const BoundReport* g = find(reports, "thm3.1: lower log density of G_eps");
  ASSERT_NE(g, nullptr);
  EXPECT_NEAR(g->bound, 2.5 / 3.0, 1e-15);
  const BoundReport* pf = find(reports, "prop3.2: upper log density of F_eps");
  ASSERT_NE(pf, nullptr);
  EXPECT_NEAR(pf->bound, 0.5, 1e-15);
  EXPECT_TRUE(pf->pass) << pf->measured;
}

TEST(LimsupSets, InfiniteLimsup) {
  LimitSetSpec spec;
  spec.phi = order_ratio(make_zigzag_unbounded(1.0));
  spec.K = kInf;
  spec.k = 1.0;
  spec.M = 10.0;
  const auto reports = verify_limsup_sets(spec, 1e100);
  const BoundReport* ud = find(reports, "thm3.1: upper log density of H_M");
  ASSERT_NE(ud, nullptr);
  EXPECT_NEAR(ud->bound, 1.0, 0.0);
  EXPECT_TRUE(ud->pass) << ud->measured;
  const BoundReport* ld = find(reports, "thm3.1: lower log density of H_M");
  ASSERT_NE(ld, nullptr);
  EXPECT_NEAR(ld->bound, 0.1, 1e-15);
  EXPECT_TRUE(ld->pass) << ld->measured;
}

TEST(LimsupSets, PremisesChecked) {
  LimitSetSpec bad = zigzag_spec(1.0, 3.0);
  bad.k = 3.0;
  for (const auto& r : verify_limsup_sets(bad, 1e4)) EXPECT_FALSE(r.applicable) << r.id;
  LimitSetSpec falling;
  falling.phi = ScalarFn("1/t^2", [](double r) { return 1 / (r * r); }, {});
  falling.K = 1.0;
  falling.k = 0.0;
  for (const auto& r : verify_limsup_sets(falling, 20.0)) EXPECT_FALSE(r.applicable) << r.id;
}

TEST(LimsupSets, MonotonicityScreen) {
  const PsiScale log = PsiScale::make(ScaleKind::log, 1.0, kInf);
  EXPECT_TRUE(phi_psi_nondecreasing(order_ratio(make_zigzag(1.0, 3.0)), log, 1.0, 1e6));
  EXPECT_FALSE(phi_psi_nondecreasing(ScalarFn::parse("1/t"), log, 1.0, 10.0));
}

TEST(LimsupSets, EstimatedLimits) {
  const Limits l = estimate_limits(order_ratio(make_zigzag(1.0, 3.0)), 1.0, 1e150);
  EXPECT_NEAR(l.upper, 3.0, 2e-2);
  EXPECT_NEAR(l.lower, 1.0, 1e-9);
}

TEST(Comparison, ZigzagAgainstConstant) {
  const PsiScale log = PsiScale::make(ScaleKind::log, 1.0, kInf);
  const auto reports = verify_comparison(ScalarFn::constant(1.0), order_ratio(make_zigzag(2.0, 4.0)), log,
                                         LimitMode::liminf, 1e12, 1.0, 2.0);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_NEAR(reports[0].bound, 0.5, 1e-15);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id << " " << r.measured;
}

TEST(Comparison, EqualFunctionsInapplicable) {
  const PsiScale log = PsiScale::make(ScaleKind::log, 1.0, kInf);
  const ScalarFn phi = order_ratio(make_zigzag(2.0, 4.0));
  const auto reports = verify_comparison(phi, phi, log, LimitMode::liminf, 1e6);
  ASSERT_FALSE(reports.empty());
  for (const auto& r : reports) EXPECT_FALSE(r.applicable);
}

TEST(Comparison, UnboundedLimsup) {
  const PsiScale log = PsiScale::make(ScaleKind::log, 1.0, kInf);
  const auto reports = verify_comparison(ScalarFn::constant(1.0), order_ratio(make_zigzag_unbounded(1.0)), log,
                                         LimitMode::limsup, 1e12, 1.0, kInf);
  ASSERT_FALSE(reports.empty());
  EXPECT_EQ(reports[0].bound, 1.0);
  EXPECT_NEAR(reports[0].measured, 1.0, 2e-2);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id;
}

TEST(Corollaries, Cor41ZigzagMidpoint) {
  const auto reports = verify_growth_corollary("cor4.1", {{"a", 2.0}, {"b", 2.0}}, make_zigzag(1.0, 3.0),
                                               std::nullopt, 1e100);
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id << " " << r.measured;
  // Zigzag metadata supplies l = 1 and L = 3 exactly.
  EXPECT_NEAR(find(reports, "cor4.1: upper log density of H")->bound, 0.5, 1e-15);
  EXPECT_NEAR(find(reports, "cor4.1: lower log density of I")->bound, 0.5, 1e-15);
  EXPECT_NEAR(find(reports, "cor4.1: lower log density of H")->bound, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(find(reports, "cor4.1: upper log density of I")->bound, 1.0 / 3.0, 1e-15);
}

TEST(Corollaries, Thm11Linear) {
  const auto reports = verify_growth_corollary("thm1.1", {{"a", 2.0}, {"b", 2.0}}, make_zigzag(1.0, 3.0),
                                               std::nullopt, 1e100);
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id << " " << r.measured;
}

TEST(Corollaries, Cor41PremiseFailure) {
  const auto reports = verify_growth_corollary("cor4.1", {{"a", 3.5}, {"b", 3.5}}, make_zigzag(1.0, 3.0),
                                               std::nullopt, 1e100);
  ASSERT_FALSE(reports.empty());
  for (const auto& r : reports) {
    EXPECT_FALSE(r.applicable);
    EXPECT_NE(r.note.find("a"), std::string::npos);
  }
}

TEST(Corollaries, Cor42And43) {
  const auto r2 = verify_growth_corollary("cor4.2", {{"eps", 0.5}}, make_zigzag(1.0, 3.0), std::nullopt, 1e12);
  ASSERT_FALSE(r2.empty());
  EXPECT_NEAR(r2[0].bound, 1.0 / 6.0, 1e-15);
  for (const auto& r : r2) EXPECT_TRUE(r.pass) << r.id << " " << r.measured;
  const auto r3 = verify_growth_corollary("cor4.3", {{"eps", 0.5}}, make_zigzag(1.0, 3.0), std::nullopt, 1e12);
  ASSERT_FALSE(r3.empty());
  EXPECT_NEAR(r3[0].bound, 1.0 / 3.0, 1e-15);
  for (const auto& r : r3) EXPECT_TRUE(r.pass) << r.id << " " << r.measured;
}

TEST(Corollaries, Cor44Type) {
  const auto T = GrowthFunction::parse("t^2*(2+sin(log(t)))");
  const auto reports = verify_growth_corollary("cor4.4", {{"rho", 2.0}, {"tau", 3.0}, {"eps0", 1.0}}, T,
                                               std::nullopt, 200.0);
  ASSERT_FALSE(reports.empty());
  EXPECT_NEAR(reports[0].bound, 1.0 - std::sqrt(2.0 / 3.0), 1e-12);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id << " " << r.measured;
}

TEST(Corollaries, Cor45SmallFunction) {
  const auto reports = verify_growth_corollary("cor4.5", {}, GrowthFunction::parse("t^2"), make_zigzag(1.0, 3.0), 1e12);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_NEAR(reports[0].bound, 1.0 / 3.0, 1e-6);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id << " " << r.measured;
}

TEST(Corollaries, Cor46TypeComparison) {
  const auto reports = verify_growth_corollary("cor4.6", {{"C", 2.0}}, GrowthFunction::parse("t^2"),
                                               GrowthFunction::parse("t^2*(2+sin(log(t)))"), 200.0);
  ASSERT_FALSE(reports.empty());
  EXPECT_NEAR(reports[0].bound, 1.0 - std::sqrt(2.0 / 3.0), 2e-2);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id << " " << r.measured;
  const auto bad = verify_growth_corollary("cor4.6", {{"C", 5.0}}, GrowthFunction::parse("t^2"),
                                           GrowthFunction::parse("t^2*(2+sin(log(t)))"), 200.0);
  for (const auto& r : bad) EXPECT_FALSE(r.applicable);
}

TEST(Corollaries, Cor47Doubling) {
  const auto T = GrowthFunction::parse("t^2*(2+sin(log(t)))");
  const auto reports = verify_growth_corollary("cor4.7", {{"rho", 2.0}, {"tau", 3.0}, {"C1", 4.0}, {"C2", 2.0}}, T,
                                               std::nullopt, 200.0);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_NEAR(reports[0].bound, 1.0 - std::sqrt(2.0) / 4.0, 1e-12);
  EXPECT_GE(reports[0].measured, 1.0 - std::sqrt(2.0) / 4.0 - 2e-2);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id << " " << r.measured;
  // C2^(1/rho) >= C1 voids the premise.
  const auto bad = verify_growth_corollary("cor4.7", {{"rho", 2.0}, {"tau", 3.0}, {"C1", 1.2}, {"C2", 2.0}}, T,
                                           std::nullopt, 200.0);
  ASSERT_FALSE(bad.empty());
  EXPECT_FALSE(bad[0].applicable);
}

TEST(Corollaries, UnknownId) {
  EXPECT_THROW(verify_growth_corollary("cor9.9", {}, make_zigzag(1.0, 3.0), std::nullopt, 100.0), Error);
}
