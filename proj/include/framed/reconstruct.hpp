#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "invariants.hpp"
#include "sampled.hpp"

namespace framed {

constexpr double kIntegrabilityTol = 1e-6;
constexpr double kStepCorrectionTol = 1e-3;

struct InvariantFields {
  Domain domain;
  InvariantFn eval;
  std::optional<std::array<Expr, 10>> exprs;  // set when given as text

  static InvariantFields from_exprs(const std::array<Expr, 10>& e, const Domain& d) {
    InvariantFields F;
    F.domain = d;
    F.exprs = e;
    F.eval = [e](double u, double v) {
      std::array<double, 10> vals;
      for (std::size_t k = 0; k < 10; ++k) vals[k] = e[k].eval(u, v);
      return BasicInvariants::from_array(vals);
    };
    return F;
  }
  static InvariantFields of_surface(const FramedField& f, const Domain& d) {
    return {d, [f](double u, double v) { return raw_invariants(f(u, v)); }, std::nullopt};
  }
};

// Largest integrability residual over the grid nodes.
inline double max_integrability_residual(const InvariantFn& F, const Grid& g) {
  double m = 0;
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) m = std::max(m, integrability_residuals(F, g.u(i), g.v(j)).max_abs());
  return m;
}

struct ReconstructResult {
  SampledSurface surface;
  double max_correction = 0;  // largest re-orthonormalization change in one step
  int substeps = 1;
};

namespace detail {

struct FrameState {
  Vec3 x, n, s, t;
};

inline FrameState axpy(const FrameState& y, double h, const FrameState& k) {
  return {y.x + h * k.x, y.n + h * k.n, y.s + h * k.s, y.t + h * k.t};
}

// Moving-frame equations along u (dir 0) or v (dir 1).
inline FrameState frame_rhs(const BasicInvariants& i, int dir, const FrameState& y) {
  double a = dir == 0 ? i.a1 : i.a2, b = dir == 0 ? i.b1 : i.b2;
  double e = dir == 0 ? i.e1 : i.e2, f = dir == 0 ? i.f1 : i.f2, g = dir == 0 ? i.g1 : i.g2;
  return {a * y.s + b * y.t, e * y.s + f * y.t, -e * y.n + g * y.t, -f * y.n - g * y.s};
}

class Integrator {
 public:
  Integrator(const InvariantFn& F, int substeps) : F_(F), substeps_(substeps) {}
  double max_correction = 0;

  // Integrate from parameter p0 to p1 along dir with the other parameter fixed.
  FrameState advance(FrameState y, int dir, double fixed, double p0, double p1) {
    double h = (p1 - p0) / substeps_;
    for (int k = 0; k < substeps_; ++k) {
      double p = p0 + k * h;
      auto at = [&](double q) { return dir == 0 ? F_(q, fixed) : F_(fixed, q); };
      BasicInvariants i0 = at(p), im = at(p + h / 2), i1 = at(p + h);
      FrameState k1 = frame_rhs(i0, dir, y);
      FrameState k2 = frame_rhs(im, dir, axpy(y, h / 2, k1));
      FrameState k3 = frame_rhs(im, dir, axpy(y, h / 2, k2));
      FrameState k4 = frame_rhs(i1, dir, axpy(y, h, k3));
      FrameState sum{k1.x + 2 * k2.x + 2 * k3.x + k4.x, k1.n + 2 * k2.n + 2 * k3.n + k4.n,
                     k1.s + 2 * k2.s + 2 * k3.s + k4.s, k1.t + 2 * k2.t + 2 * k3.t + k4.t};
      y = axpy(y, h / 6, sum);
      y = orthonormalize(y);
    }
    return y;
  }

 private:
  const InvariantFn& F_;
  int substeps_;

  // Gram-Schmidt in the order n, s, then t = n x s.
  FrameState orthonormalize(const FrameState& y) {
    Vec3 n = normalized(y.n);
    Vec3 s = normalized(y.s - dot(y.s, n) * n);
    Vec3 t = cross(n, s);
    double corr = std::max({norm(n - y.n), norm(s - y.s), norm(t - y.t)});
    max_correction = std::max(max_correction, corr);
    if (corr > kStepCorrectionTol)
      throw StepError("frame re-orthonormalization correction " + std::to_string(corr) + " exceeds " +
                      std::to_string(kStepCorrectionTol));
    return {y.x, n, s, t};
  }
};

inline ReconstructResult reconstruct_once(const InvariantFn& F, const FramePoint& seed, const Grid& g,
                                          int substeps) {
  Integrator integ(F, substeps);
  const double u0 = g.domain.u0, v0 = g.domain.v0;
  FrameState y0{seed.x, seed.n, seed.s, cross(seed.n, seed.s)};
  std::vector<FrameState> spine(static_cast<std::size_t>(g.nv));
  // Spine along v at u0, outward from v0 in both directions.
  {
    FrameState y = y0;
    double p = v0;
    for (int j = 0; j < g.nv; ++j)
      if (g.v(j) >= v0) {
        y = integ.advance(y, 1, u0, p, g.v(j));
        p = g.v(j);
        spine[j] = y;
      }
    y = y0;
    p = v0;
    for (int j = g.nv - 1; j >= 0; --j)
      if (g.v(j) < v0) {
        y = integ.advance(y, 1, u0, p, g.v(j));
        p = g.v(j);
        spine[j] = y;
      }
  }
  ReconstructResult out;
  out.substeps = substeps;
  out.surface = SampledSurface{g, std::vector<FramePoint>(g.size())};
  for (int j = 0; j < g.nv; ++j) {
    const double vj = g.v(j);
    auto store = [&](int i, const FrameState& y) { out.surface.at(i, j) = {y.x, y.n, y.s}; };
    FrameState y = spine[j];
    double p = u0;
    for (int i = 0; i < g.nu; ++i)
      if (g.u(i) >= u0) {
        y = integ.advance(y, 0, vj, p, g.u(i));
        p = g.u(i);
        store(i, y);
      }
    y = spine[j];
    p = u0;
    for (int i = g.nu - 1; i >= 0; --i)
      if (g.u(i) < u0) {
        y = integ.advance(y, 0, vj, p, g.u(i));
        p = g.u(i);
        store(i, y);
      }
  }
  out.max_correction = integ.max_correction;
  return out;
}

}  // namespace detail

// Integrate a framed surface from its basic invariants: first along v at u0, then along u.
inline ReconstructResult reconstruct(const InvariantFields& F, const FramePoint& seed, const Grid& g,
                                     double integrability_tol = kIntegrabilityTol) {
  double res = max_integrability_residual(F.eval, g);
  if (!(res <= integrability_tol))
    throw IntegrabilityError("invariant fields violate the compatibility relations: residual " +
                             std::to_string(res));
  frame_t(seed.n, seed.s);
  try {
    return detail::reconstruct_once(F.eval, seed, g, 1);
  } catch (const StepError&) {
    return detail::reconstruct_once(F.eval, seed, g, 2);
  }
}

struct RigidMotion {
  Mat3 rotation = Mat3::identity();
  Vec3 translation;

  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  Vec3 rotate(const Vec3& v) const { return rotation * v; }
};

struct Congruence {
  RigidMotion motion;
  double max_error = 0;
};

// Motion taking A's frame at the base node onto B's, and the worst mismatch it leaves.
inline Congruence congruence(const SampledSurface& A, const SampledSurface& B) {
  const Grid& g = A.grid;
  if (g.nu != B.grid.nu || g.nv != B.grid.nv) throw SpecError("congruence needs surfaces on the same grid");
  int i0 = g.nearest_i(g.domain.u0), j0 = g.nearest_j(g.domain.v0);
  const FramePoint &pa = A.at(i0, j0), &pb = B.at(i0, j0);
  Mat3 FA = Mat3::from_columns(pa.n, pa.s, pa.t()), FB = Mat3::from_columns(pb.n, pb.s, pb.t());
  Congruence c;
  c.motion.rotation = FB * FA.transpose();
  c.motion.translation = pb.x - c.motion.rotation * pa.x;
  for (std::size_t k = 0; k < A.points.size(); ++k) {
    const FramePoint &a = A.points[k], &b = B.points[k];
    double e = norm(c.motion.apply(a.x) - b.x) + norm(c.motion.rotate(a.n) - b.n) +
               norm(c.motion.rotate(a.s) - b.s);
    c.max_error = std::max(c.max_error, e);
  }
  return c;
}

}  // namespace framed
