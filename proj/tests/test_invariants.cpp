#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace framed;
using namespace testsupport;

TEST(Invariants, CuspidalEdgeAtVTwo) {
  BasicInvariants i = basic_invariants(cuspidal_edge(), 0, 2);
  EXPECT_NEAR(i.a1, 1, 1e-15);
  EXPECT_NEAR(i.b1, 0, 1e-15);
  EXPECT_NEAR(i.a2, 0, 1e-15);
  EXPECT_NEAR(i.b2, 2 * std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(i.e1, 0, 1e-15);
  EXPECT_NEAR(i.f1, 0, 1e-15);
  EXPECT_NEAR(i.g1, 0, 1e-15);
  EXPECT_NEAR(i.e2, 0, 1e-15);
  EXPECT_NEAR(i.f2, -0.2, 1e-15);
  EXPECT_NEAR(i.g2, 0, 1e-15);
}

// With the unit normal the projections are 1/sqrt(2) of the unnormalized ones
// (which would give b1 = 2 sqrt(2), b2 = -2 at v = 1).
TEST(Invariants, HelicoidFamilyNormalizedFrameAtVOne) {
  BasicInvariants i = basic_invariants(helicoid_family(), 0, 1);
  EXPECT_NEAR(i.a1, 0, 1e-15);
  EXPECT_NEAR(i.b1, 2, 1e-14);
  EXPECT_NEAR(i.a2, 2, 1e-14);
  EXPECT_NEAR(i.b2, -sqrt2(), 1e-14);
  EXPECT_NEAR(i.e1, 0.5, 1e-15);
  EXPECT_NEAR(i.f1, 1 / sqrt2(), 1e-15);
  EXPECT_NEAR(i.g1, 0.5, 1e-15);
  EXPECT_NEAR(i.e2, 1 / (2 * sqrt2()), 1e-15);
  EXPECT_NEAR(i.f2, 0, 1e-15);
  EXPECT_NEAR(i.g2, -1 / (2 * sqrt2()), 1e-15);
}

TEST(Invariants, FlatPlane) {
  BasicInvariants i = basic_invariants(plane(), 0.3, -0.4);
  EXPECT_EQ(i.a1, 1);
  EXPECT_EQ(i.b1, 0);
  EXPECT_EQ(i.a2, 0);
  EXPECT_EQ(i.b2, 1);
  for (double x : {i.e1, i.f1, i.g1, i.e2, i.f2, i.g2}) EXPECT_EQ(x, 0);
}

TEST(Invariants, RejectsBrokenFrame) {
  SurfaceDef bad = SurfaceDef::from_strings("bad", {"u", "v", "0"}, {"1", "0", "1"}, {"0", "1", "0"}, square());
  EXPECT_THROW(basic_invariants(bad, 0, 0), FrameError);
  SurfaceDef not_normal = SurfaceDef::from_strings("tilt", {"u", "v", "u"}, {"0", "0", "1"}, {"1", "0", "0"}, square());
  EXPECT_THROW(basic_invariants(not_normal, 0, 0), FrameError);
}

TEST(Integrability, CuspidalEdgeResidualsVanish) {
  IntegrabilityResiduals r = integrability_residuals(cuspidal_edge(), 0.3, 0.7);
  EXPECT_LE(r.max_abs(), 1e-6);
}

TEST(Integrability, FlatPlaneIsExact) {
  IntegrabilityResiduals r = integrability_residuals(plane(), 0.2, 0.1);
  for (double x : r.r) EXPECT_EQ(x, 0);
}

namespace {
InvariantFn cuspidal_fields(std::function<double(double, double)> b2) {
  return [b2](double u, double v) {
    return BasicInvariants{1, 0, 0, b2(u, v), 0, 0, 0, 0, -1 / (v * v + 1), 0};
  };
}
}  // namespace

TEST(Integrability, CorruptedFieldsAreDetected) {
  auto F = cuspidal_fields([](double u, double v) { return u * v + v * v; });
  IntegrabilityResiduals r = integrability_residuals(F, 0.3, 0.7);
  EXPECT_NEAR(r.r[1], -0.7, 1e-8);
  EXPECT_GE(r.max_abs(), 1e-2);
}

// Replacing b2 by v^2 alone keeps all six relations satisfied: b2 only enters
// through its u-derivative and products with vanishing g, e, f1.
TEST(Integrability, ReplacingB2ByVSquaredStaysIntegrable) {
  auto F = cuspidal_fields([](double, double v) { return v * v; });
  EXPECT_LE(integrability_residuals(F, 0.3, 0.7).max_abs(), 1e-9);
}

TEST(Curvature, CuspidalEdgeAtVOne) {
  CurvatureTriple c = curvature(basic_invariants(cuspidal_edge(), 0.5, 1));
  EXPECT_NEAR(c.J, sqrt2(), 1e-14);
  EXPECT_NEAR(c.K, 0, 1e-15);
  EXPECT_NEAR(c.H, 0.25, 1e-15);
}

// Determinant combinations of the helicoid-family invariants as printed (before
// normalization) at v = 1, and of the normalized frame.
TEST(Curvature, HelicoidFamilyAtVOne) {
  double r = sqrt2();
  BasicInvariants printed{0, 2 * r, 2, -2, -1 / r, 2 / r, 1 / r, 0.5, 0, -0.5};
  CurvatureTriple p = curvature(printed);
  EXPECT_NEAR(p.J, -4 * r, 1e-14);  // det G; the printed J has the opposite sign
  EXPECT_NEAR(p.K, -1 / r, 1e-15);
  EXPECT_NEAR(p.H, r, 1e-15);
  CurvatureTriple c = curvature(basic_invariants(helicoid_family(), 0, 1));
  EXPECT_NEAR(c.J, -4, 1e-14);
  EXPECT_NEAR(c.K, -0.25, 1e-15);
  EXPECT_NEAR(c.H, r, 1e-14);
}

TEST(Curvature, ZeroInvariants) {
  CurvatureTriple c = curvature(BasicInvariants{});
  EXPECT_EQ(c.J, 0);
  EXPECT_EQ(c.K, 0);
  EXPECT_EQ(c.H, 0);
}

TEST(Singular, CuspidalEdgeAndPlane) {
  EXPECT_TRUE(is_singular(basic_invariants(cuspidal_edge(), 0.2, 0), 1e-9));
  EXPECT_FALSE(is_singular(basic_invariants(cuspidal_edge(), 0.2, 1), 1e-9));
  for (double u : {-1.0, 0.0, 0.7})
    for (double v : {-1.0, 0.0, 0.5}) EXPECT_FALSE(is_singular(basic_invariants(plane(), u, v), 1e-9));
}

TEST(Front, CuspidalEdgeOriginIsRankOneFront) {
  EXPECT_EQ(classify_front(cuspidal_edge(), 0, 0, 1e-9), FrontClass::FrontRank1);
  EXPECT_EQ(classify_front(cuspidal_edge(), 0, 0.5, 1e-9), FrontClass::Regular);
}

TEST(Front, PlaneIsRegular) { EXPECT_EQ(classify_front(plane(), 0.1, 0.2, 1e-9), FrontClass::Regular); }

TEST(Front, PointWithSphereFrameIsRankZeroFront) {
  SurfaceDef P = point_sphere();
  BasicInvariants i = basic_invariants(P, 0, 0);
  EXPECT_NEAR(curvature(i).K, 1, 1e-15);
  EXPECT_EQ(classify_front(P, 0, 0, 1e-9), FrontClass::FrontRank0);
  EXPECT_LE(integrability_residuals(P, 0.3, 0.2).max_abs(), 1e-6);
}

TEST(Front, UndeterminedWhenHVanishes) {
  BasicInvariants i{1, 0, 0, 0, 0, 0, 0, 0, 0, 0};  // rank 1, H = 0
  EXPECT_EQ(classify_front(i, 1e-9), FrontClass::NotFrontOrUndetermined);
  EXPECT_EQ(classify_front(BasicInvariants{}, 1e-9), FrontClass::NotFrontOrUndetermined);
}

TEST(RotateFrame, ZeroAngleKeepsInvariants) {
  SurfaceDef R = rotate_frame(cuspidal_edge(), parse("0"));
  EXPECT_LE(max_abs_diff(basic_invariants(R, 0.3, 0.6), basic_invariants(cuspidal_edge(), 0.3, 0.6)), 1e-15);
}

TEST(RotateFrame, QuarterTurnOnCuspidalEdge) {
  SurfaceDef R = rotate_frame(cuspidal_edge(), parse("pi/2"));
  BasicInvariants i = basic_invariants(R, 0.3, 0.6);
  EXPECT_NEAR(i.a1, 0, 1e-15);
  EXPECT_NEAR(i.b1, 1, 1e-15);
  double v = 0.6;
  EXPECT_NEAR(i.a2, -v * std::sqrt(v * v + 1), 1e-15);
  EXPECT_NEAR(i.b2, 0, 1e-15);
}

TEST(RotateFrame, AngleUOnPlane) {
  BasicInvariants i = basic_invariants(rotate_frame(plane(), parse("u")), 0.4, 0.1);
  EXPECT_NEAR(i.g1, -1, 1e-15);
  EXPECT_NEAR(i.g2, 0, 1e-15);
  for (double x : {i.e1, i.f1, i.e2, i.f2}) EXPECT_NEAR(x, 0, 1e-15);
}

TEST(RotateFrame, MatchesPredictedLaw) {
  Expr th = parse("0.4 + u*v - sin(v)");
  SurfaceDef R = rotate_frame(crosscap(), th);
  for (double u : {-0.5, 0.2})
    for (double v : {-0.3, 0.8}) {
      BasicInvariants got = basic_invariants(R, u, v);
      BasicInvariants want = predicted_rotation(basic_invariants(crosscap(), u, v), th.eval_jet(u, v));
      EXPECT_LE(max_abs_diff(got, want), 1e-12);
    }
}

TEST(ReflectFrame, PlaneSwapsColumns) {
  BasicInvariants i = basic_invariants(reflect_frame(plane()), 0.1, 0.2);
  EXPECT_EQ(i.a1, 0);
  EXPECT_EQ(i.b1, 1);
  EXPECT_EQ(i.a2, 1);
  EXPECT_EQ(i.b2, 0);
  for (double x : {i.e1, i.f1, i.g1, i.e2, i.f2, i.g2}) EXPECT_EQ(std::abs(x), 0);
}

TEST(ReflectFrame, CuspidalEdge) {
  double v = 0.8;
  BasicInvariants i = basic_invariants(reflect_frame(cuspidal_edge()), 0.1, v);
  EXPECT_NEAR(i.b2, 0, 1e-15);
  EXPECT_NEAR(i.a2, v * std::sqrt(v * v + 1), 1e-15);
  EXPECT_NEAR(i.e2, 1 / (v * v + 1), 1e-15);
}

TEST(ReflectFrame, TwiceRestoresInvariants) {
  SurfaceDef RR = reflect_frame(reflect_frame(crosscap()));
  EXPECT_LE(max_abs_diff(basic_invariants(RR, 0.3, -0.4), basic_invariants(crosscap(), 0.3, -0.4)), 1e-14);
}
