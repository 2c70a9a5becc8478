#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace framed;
using namespace testsupport;

namespace {

const MateKind kAllKinds[] = {MateKind::NN, MateKind::NS, MateKind::NT, MateKind::SN, MateKind::SS,
                              MateKind::ST, MateKind::TN, MateKind::TS, MateKind::TT};

double rel(double a, double b) { return std::abs(a - b) / (1 + std::abs(b)); }

}  // namespace

class FrameChangeProperties : public ::testing::Test {
 protected:
  static constexpr int ITERATIONS = 100;
  static constexpr unsigned SEED = 4242;
  std::mt19937_64 rng{SEED};
  std::uniform_real_distribution<double> point{-0.8, 0.8};
};

TEST_F(FrameChangeProperties, RotationLawHolds) {
  for (int it = 0; it < ITERATIONS; ++it) {
    SurfaceDef S = random_graph(rng);
    Expr th = parse(random_theta_text(rng));
    SurfaceDef R = rotate_frame(S, th);
    double u = point(rng), v = point(rng);
    BasicInvariants base = basic_invariants(S, u, v);
    BasicInvariants got = basic_invariants(R, u, v);
    EXPECT_LE(max_abs_diff(got, predicted_rotation(base, th.eval_jet(u, v))), 1e-9) << th.to_string();
    CurvatureTriple c0 = curvature(base), c1 = curvature(got);
    EXPECT_NEAR(c1.J, c0.J, 1e-9);
    EXPECT_NEAR(c1.K, c0.K, 1e-9);
    EXPECT_NEAR(c1.H, c0.H, 1e-9);
  }
}

TEST_F(FrameChangeProperties, ReflectionLawHolds) {
  for (int it = 0; it < ITERATIONS; ++it) {
    SurfaceDef S = random_graph(rng);
    SurfaceDef R = reflect_frame(S);
    double u = point(rng), v = point(rng);
    BasicInvariants base = basic_invariants(S, u, v);
    BasicInvariants got = basic_invariants(R, u, v);
    EXPECT_LE(max_abs_diff(got, predicted_reflection(base)), 1e-9);
    CurvatureTriple c0 = curvature(base), c1 = curvature(got);
    EXPECT_NEAR(c1.J, -c0.J, 1e-9);
    EXPECT_NEAR(c1.K, -c0.K, 1e-9);
    EXPECT_NEAR(c1.H, c0.H, 1e-9);
  }
}

TEST_F(FrameChangeProperties, PredictedLawsOnRandomTuples) {
  std::uniform_real_distribution<double> d(-3, 3);
  for (int it = 0; it < ITERATIONS; ++it) {
    BasicInvariants i = random_invariants(rng);
    Jet1 th{d(rng), d(rng), d(rng)};
    CurvatureTriple c0 = curvature(i), c1 = curvature(predicted_rotation(i, th)),
                    c2 = curvature(predicted_reflection(i));
    EXPECT_NEAR(c1.J, c0.J, 1e-12);
    EXPECT_NEAR(c1.K, c0.K, 1e-12);
    EXPECT_NEAR(c1.H, c0.H, 1e-12);
    EXPECT_NEAR(c2.J, -c0.J, 1e-12);
    EXPECT_NEAR(c2.K, -c0.K, 1e-12);
    EXPECT_NEAR(c2.H, c0.H, 1e-12);
    // Rotating by th then by -th restores the tuple.
    Jet1 back{-th.value, -th.du, -th.dv};
    EXPECT_LE(max_abs_diff(predicted_rotation(predicted_rotation(i, th), back), i), 1e-12);
  }
}

class IntegrabilityProperties : public ::testing::Test {
 protected:
  static constexpr int ITERATIONS = 60;
  static constexpr unsigned SEED = 99;
  std::mt19937_64 rng{SEED};
  std::uniform_real_distribution<double> point{-0.8, 0.8};
};

TEST_F(IntegrabilityProperties, RandomFramedGraphsSatisfyTheRelations) {
  for (int it = 0; it < ITERATIONS; ++it) {
    SurfaceDef S = rotate_frame(random_graph(rng), parse(random_theta_text(rng)));
    EXPECT_LE(integrability_residuals(S, point(rng), point(rng)).max_abs(), 1e-6);
  }
}

TEST_F(IntegrabilityProperties, ReconstructionRoundTrip) {
  for (int it = 0; it < 4; ++it) {
    SurfaceDef S = random_graph(rng);
    Grid g(S.domain, 41, 41);
    FrameJet b = S.eval(0, 0);
    ReconstructResult r = reconstruct(InvariantFields::of_surface(S.field(), S.domain),
                                      {b.x.value, b.n.value, b.s.value}, g);
    EXPECT_LE(congruence(sample(S.field(), g), r.surface).max_error, 1e-4);
  }
}

class MateProperties : public ::testing::Test {
 protected:
  static constexpr int ITERATIONS = 30;
  static constexpr unsigned SEED = 31337;
  std::mt19937_64 rng{SEED};
  std::uniform_real_distribution<double> point{-0.8, 0.8};
  std::uniform_real_distribution<double> coef{-1.5, 1.5};

  Expr random_lambda() {
    return parse(num(coef(rng)) + " + " + num(coef(rng)) + "*u*v + " + num(coef(rng)) + "*cos(v)");
  }
};

// The closed-form mate invariants are projections and hold whether or not the
// existence condition is met, so they can be checked on arbitrary fields.
TEST_F(MateProperties, PredictionsMatchRecomputedForEveryKind) {
  for (int it = 0; it < ITERATIONS; ++it) {
    SurfaceDef S = random_graph(rng);
    Expr lam = random_lambda(), th = parse(random_theta_text(rng));
    double u = point(rng), v = point(rng);
    FrameJet B = S.eval(u, v);
    BasicInvariants inv = raw_invariants(B);
    for (MateKind k : kAllKinds) {
      Jet1 L = lam.eval_jet(u, v), T = th.eval_jet(u, v);
      FrameJet M = mate_frame(k, B, L, T);
      EXPECT_LE(frame_defect(M.n.value, M.s.value), 1e-12) << to_string(k);
      EXPECT_LE(max_abs_diff(raw_invariants(M), predict_mate_invariants(k, inv, L, T)), 1e-9) << to_string(k);
    }
  }
}

TEST_F(MateProperties, ConditionResidualIsTheTangencyDefect) {
  for (int it = 0; it < ITERATIONS; ++it) {
    SurfaceDef S = random_graph(rng);
    Expr lam = random_lambda(), th = parse(random_theta_text(rng));
    double u = point(rng), v = point(rng);
    FrameJet B = S.eval(u, v);
    Jet1 L = lam.eval_jet(u, v), T = th.eval_jet(u, v);
    for (MateKind k : kAllKinds) {
      FrameJet M = mate_frame(k, B, L, T);
      ConditionResidual r = condition_residual(k, raw_invariants(B), L, T);
      EXPECT_NEAR(std::abs(r.r1), std::abs(dot(M.x.du, M.n.value)), 1e-12) << to_string(k);
      EXPECT_NEAR(std::abs(r.r2), std::abs(dot(M.x.dv, M.n.value)), 1e-12) << to_string(k);
    }
  }
}

TEST_F(MateProperties, CausticQuarterTurnEquivalence) {
  for (int it = 0; it < ITERATIONS; ++it) {
    BasicInvariants i = random_invariants(rng);
    Jet1 L{coef(rng), 0, 0};
    double th = coef(rng);
    ConditionResidual ns = condition_residual(MateKind::NS, i, L, Jet1{th, 0, 0});
    ConditionResidual nt = condition_residual(MateKind::NT, i, L, Jet1{th - std::numbers::pi / 2, 0, 0});
    ConditionResidual nt2 = condition_residual(MateKind::NT, i, L, Jet1{th + std::numbers::pi / 2, 0, 0});
    EXPECT_NEAR(ns.r1, nt.r1, 1e-12);
    EXPECT_NEAR(ns.r2, nt.r2, 1e-12);
    EXPECT_NEAR(ns.r1, -nt2.r1, 1e-12);
    EXPECT_NEAR(ns.r2, -nt2.r2, 1e-12);
  }
}

class CausticProperties : public ::testing::Test {
 protected:
  static constexpr int ITERATIONS = 200;
  static constexpr unsigned SEED = 777;
  std::mt19937_64 rng{SEED};
};

// Oracle: sign changes of det(G + lambda E) on a fine scan of [-1000, 1000], refined by bisection.
TEST_F(CausticProperties, RootsMatchBruteForceScan) {
  for (int it = 0; it < ITERATIONS; ++it) {
    BasicInvariants i = random_invariants(rng);
    auto det = [&](double l) {
      return (i.a1 + l * i.e1) * (i.b2 + l * i.f2) - (i.b1 + l * i.f1) * (i.a2 + l * i.e2);
    };
    std::vector<double> oracle;
    const int N = 400000;
    double prev = -1000, fp = det(prev);
    for (int k = 1; k <= N; ++k) {
      double x = -1000 + 2000.0 * k / N, fx = det(x);
      if ((fp < 0) != (fx < 0)) {
        double lo = prev, hi = x;
        for (int b = 0; b < 80; ++b) {
          double mid = 0.5 * (lo + hi);
          if ((det(lo) < 0) != (det(mid) < 0)) hi = mid;
          else lo = mid;
        }
        oracle.push_back(0.5 * (lo + hi));
      }
      prev = x;
      fp = fx;
    }
    CausticRoots r = solve_caustic_lambda(i);
    std::vector<double> in_range;
    for (double x : r.roots)
      if (std::abs(x) < 1000) in_range.push_back(x);
    ASSERT_EQ(in_range.size(), oracle.size());
    for (std::size_t k = 0; k < oracle.size(); ++k) EXPECT_LE(rel(in_range[k], oracle[k]), 1e-9);
  }
}

TEST_F(CausticProperties, SolvedThetaAnnihilatesTheMatrix) {
  std::uniform_real_distribution<double> d(-2, 2);
  for (int it = 0; it < ITERATIONS; ++it) {
    // Build invariants whose caustic matrix at lambda = l has a kernel.
    double l = d(rng), th = d(rng);
    BasicInvariants i = random_invariants(rng);
    // Adjust b1, b2 so row k of G + lE is proportional to (cos th, -sin th).
    double c = std::cos(th), s = std::sin(th);
    if (std::abs(c) < 0.1) continue;
    for (int row = 0; row < 2; ++row) {
      double& a = row ? i.a2 : i.a1;
      double& b = row ? i.b2 : i.b1;
      double e = row ? i.e2 : i.e1, f = row ? i.f2 : i.f1;
      double p = a + l * e;
      b = -p * s / c - l * f;  // p sin + (b + l f) cos = 0
    }
    double got = solve_caustic_theta(i, l);
    double r1 = (i.a1 + l * i.e1) * std::sin(got) + (i.b1 + l * i.f1) * std::cos(got);
    double r2 = (i.a2 + l * i.e2) * std::sin(got) + (i.b2 + l * i.f2) * std::cos(got);
    EXPECT_NEAR(r1, 0, 1e-9);
    EXPECT_NEAR(r2, 0, 1e-9);
  }
}
