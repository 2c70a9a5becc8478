#pragma once

#include <vector>

#include "core.hpp"
#include "invariants.hpp"
#include "surface.hpp"

namespace framed {

struct FramePoint {
  Vec3 x, n, s;
  Vec3 t() const { return cross(n, s); }
};

// Framed surface sampled on a grid, row-major (rows of constant v).
struct SampledSurface {
  Grid grid;
  std::vector<FramePoint> points;

  const FramePoint& at(int i, int j) const { return points[grid.index(i, j)]; }
  FramePoint& at(int i, int j) { return points[grid.index(i, j)]; }
};

inline SampledSurface sample(const FramedField& f, const Grid& g) {
  SampledSurface out{g, std::vector<FramePoint>(g.size())};
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      FrameJet F = f(g.u(i), g.v(j));
      out.at(i, j) = {F.x.value, F.n.value, F.s.value};
    }
  return out;
}

inline std::vector<BasicInvariants> sample_invariants(const FramedField& f, const Grid& g) {
  std::vector<BasicInvariants> out(g.size());
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) out[g.index(i, j)] = raw_invariants(f(g.u(i), g.v(j)));
  return out;
}

// Invariants of a sampled surface by finite differences at interior nodes: the
// five-point stencil where two neighbours exist on each side, else central.
inline BasicInvariants finite_difference_invariants(const SampledSurface& S, int i, int j) {
  const Grid& g = S.grid;
  auto diff = [&](bool along_u, Vec3 FramePoint::*m) {
    int k = along_u ? i : j, n = along_u ? g.nu : g.nv;
    auto at = [&](int o) -> const FramePoint& { return along_u ? S.at(i + o, j) : S.at(i, j + o); };
    double h = along_u ? g.u(i + 1) - g.u(i) : g.v(j + 1) - g.v(j);
    if (k >= 2 && k + 2 < n)
      return (at(-2).*m - 8.0 * (at(-1).*m) + 8.0 * (at(1).*m) - at(2).*m) / (12 * h);
    double span = along_u ? g.u(i + 1) - g.u(i - 1) : g.v(j + 1) - g.v(j - 1);
    return (at(1).*m - at(-1).*m) / span;
  };
  const FramePoint& c = S.at(i, j);
  Vec3 xu = diff(true, &FramePoint::x), xv = diff(false, &FramePoint::x);
  Vec3 nu = diff(true, &FramePoint::n), nv = diff(false, &FramePoint::n);
  Vec3 su = diff(true, &FramePoint::s), sv = diff(false, &FramePoint::s);
  Vec3 s = c.s, t = c.t();
  return {dot(xu, s), dot(xu, t), dot(xv, s), dot(xv, t), dot(nu, s),
          dot(nu, t), dot(su, t), dot(nv, s), dot(nv, t), dot(sv, t)};
}

}  // namespace framed
