#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "core.hpp"
#include "surface.hpp"

namespace framed {

struct BasicInvariants {
  double a1 = 0, b1 = 0, a2 = 0, b2 = 0;
  double e1 = 0, f1 = 0, g1 = 0;
  double e2 = 0, f2 = 0, g2 = 0;

  static constexpr std::array<const char*, 10> names = {"a1", "b1", "a2", "b2", "e1",
                                                        "f1", "g1", "e2", "f2", "g2"};

  std::array<double, 10> as_array() const { return {a1, b1, a2, b2, e1, f1, g1, e2, f2, g2}; }
  static BasicInvariants from_array(const std::array<double, 10>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
  }
};

inline double max_abs_diff(const BasicInvariants& p, const BasicInvariants& q) {
  auto a = p.as_array(), b = q.as_array();
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct CurvatureTriple {
  double J = 0, K = 0, H = 0;
};

struct IntegrabilityResiduals {
  std::array<double, 6> r{};
  double max_abs() const {
    double m = 0;
    for (double x : r) m = std::max(m, std::abs(x));
    return m;
  }
};

enum class FrontClass { Regular, FrontRank1, FrontRank0, NotFrontOrUndetermined };

inline const char* to_string(FrontClass c) {
  switch (c) {
    case FrontClass::Regular: return "Regular";
    case FrontClass::FrontRank1: return "FrontRank1";
    case FrontClass::FrontRank0: return "FrontRank0";
    case FrontClass::NotFrontOrUndetermined: return "NotFrontOrUndetermined";
  }
  return "?";
}

// The ten projections, no frame validation.
inline BasicInvariants raw_invariants(const FrameJet& F) {
  Vec3 s = F.s.value, t = cross(F.n.value, F.s.value);
  return {dot(F.x.du, s), dot(F.x.du, t), dot(F.x.dv, s), dot(F.x.dv, t), dot(F.n.du, s),
          dot(F.n.du, t), dot(F.s.du, t), dot(F.n.dv, s), dot(F.n.dv, t), dot(F.s.dv, t)};
}

// Largest violation of unit length, orthogonality and tangency x_u.n = x_v.n = 0.
inline double frame_defect(const FrameJet& F) {
  return std::max({frame_defect(F.n.value, F.s.value), std::abs(dot(F.x.du, F.n.value)),
                   std::abs(dot(F.x.dv, F.n.value))});
}

inline void require_frame(const FrameJet& F, double u, double v, double tol) {
  double d = frame_defect(F);
  if (!(d <= tol))
    throw FrameError("framed-surface conditions fail at (" + std::to_string(u) + ", " + std::to_string(v) +
                     "): defect " + std::to_string(d));
}

inline BasicInvariants basic_invariants(const SurfaceDef& S, double u, double v, double tol = kFrameTol) {
  FrameJet F = S.eval(u, v);
  require_frame(F, u, v, tol);
  return raw_invariants(F);
}

inline BasicInvariants basic_invariants(const FramedField& f, double u, double v) { return raw_invariants(f(u, v)); }

inline CurvatureTriple curvature(const BasicInvariants& i) {
  return {i.a1 * i.b2 - i.a2 * i.b1, i.e1 * i.f2 - i.e2 * i.f1,
          -0.5 * ((i.a1 * i.f2 - i.a2 * i.f1) - (i.b1 * i.e2 - i.b2 * i.e1))};
}

using InvariantFn = std::function<BasicInvariants(double, double)>;

constexpr double kResidualStep = 1e-5;

// Signed LHS - RHS of the six compatibility relations. Partials of the invariant
// fields are central differences with step h.
inline IntegrabilityResiduals integrability_residuals(const InvariantFn& F, double u, double v,
                                                      double h = kResidualStep) {
  BasicInvariants c = F(u, v);
  BasicInvariants up = F(u + h, v), um = F(u - h, v), vp = F(u, v + h), vm = F(u, v - h);
  auto du = [&](double BasicInvariants::*m) { return (up.*m - um.*m) / (2 * h); };
  auto dv = [&](double BasicInvariants::*m) { return (vp.*m - vm.*m) / (2 * h); };
  using B = BasicInvariants;
  IntegrabilityResiduals r;
  r.r[0] = dv(&B::a1) - c.b1 * c.g2 - (du(&B::a2) - c.b2 * c.g1);
  r.r[1] = dv(&B::b1) - c.a2 * c.g1 - (du(&B::b2) - c.a1 * c.g2);
  r.r[2] = c.a1 * c.e2 + c.b1 * c.f2 - (c.a2 * c.e1 + c.b2 * c.f1);
  r.r[3] = dv(&B::e1) - c.f1 * c.g2 - (du(&B::e2) - c.f2 * c.g1);
  r.r[4] = dv(&B::f1) - c.e2 * c.g1 - (du(&B::f2) - c.e1 * c.g2);
  r.r[5] = dv(&B::g1) - c.e1 * c.f2 - (du(&B::g2) - c.e2 * c.f1);
  return r;
}

inline IntegrabilityResiduals integrability_residuals(const SurfaceDef& S, double u, double v,
                                                      double h = kResidualStep) {
  return integrability_residuals([&S](double uu, double vv) { return raw_invariants(S.eval(uu, vv)); }, u, v, h);
}

inline bool is_singular(const BasicInvariants& inv, double tol) { return std::abs(curvature(inv).J) <= tol; }

inline FrontClass classify_front(const BasicInvariants& inv, double tol) {
  CurvatureTriple c = curvature(inv);
  if (std::abs(c.J) > tol) return FrontClass::Regular;
  double gmax = std::max({std::abs(inv.a1), std::abs(inv.b1), std::abs(inv.a2), std::abs(inv.b2)});
  if (gmax > tol) return std::abs(c.H) > tol ? FrontClass::FrontRank1 : FrontClass::NotFrontOrUndetermined;
  return std::abs(c.K) > tol ? FrontClass::FrontRank0 : FrontClass::NotFrontOrUndetermined;
}

inline FrontClass classify_front(const SurfaceDef& S, double u, double v, double tol) {
  return classify_front(raw_invariants(S.eval(u, v)), tol);
}

namespace detail {

inline std::array<Expr, 3> cross_expr(const std::array<Expr, 3>& a, const std::array<Expr, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace detail

// (x, n, cos(theta) s - sin(theta) t).
inline SurfaceDef rotate_frame(const SurfaceDef& S, const Expr& theta) {
  SurfaceDef R = S;
  R.name = S.name + "_rot";
  auto t = detail::cross_expr(S.n, S.s);
  Expr c = call("cos", theta), sn = call("sin", theta);
  for (int i = 0; i < 3; ++i) R.s[i] = c * S.s[i] - sn * t[i];
  return R;
}

// (x, -n, t).
inline SurfaceDef reflect_frame(const SurfaceDef& S) {
  SurfaceDef R = S;
  R.name = S.name + "_refl";
  auto t = detail::cross_expr(S.n, S.s);
  for (int i = 0; i < 3; ++i) {
    R.n[i] = -S.n[i];
    R.s[i] = t[i];
  }
  return R;
}

// Invariants of the rotated frame from the original ones and the jet of theta.
inline BasicInvariants predicted_rotation(const BasicInvariants& i, const Jet1& th) {
  double c = std::cos(th.value), s = std::sin(th.value);
  return {i.a1 * c - i.b1 * s, i.a1 * s + i.b1 * c, i.a2 * c - i.b2 * s, i.a2 * s + i.b2 * c,
          i.e1 * c - i.f1 * s, i.e1 * s + i.f1 * c, i.g1 - th.du,
          i.e2 * c - i.f2 * s, i.e2 * s + i.f2 * c, i.g2 - th.dv};
}

inline BasicInvariants predicted_reflection(const BasicInvariants& i) {
  return {i.b1, i.a1, i.b2, i.a2, -i.f1, -i.e1, -i.g1, -i.f2, -i.e2, -i.g2};
}

}  // namespace framed
