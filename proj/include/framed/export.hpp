#pragma once

#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "errors.hpp"
#include "invariants.hpp"
#include "sampled.hpp"

namespace framed {

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << std::setprecision(17);
  return out;
}

// Wavefront OBJ: one vertex and one normal per sample, two triangles per cell.
inline void export_mesh(const SampledSurface& S, const std::string& path) {
  auto out = open_for_write(path);
  const Grid& g = S.grid;
  for (const auto& p : S.points) out << "v " << p.x.x << ' ' << p.x.y << ' ' << p.x.z << '\n';
  for (const auto& p : S.points) out << "vn " << p.n.x << ' ' << p.n.y << ' ' << p.n.z << '\n';
  auto id = [&](int i, int j) { return g.index(i, j) + 1; };
  auto corner = [](std::size_t k) { return std::to_string(k) + "//" + std::to_string(k); };
  for (int j = 0; j + 1 < g.nv; ++j)
    for (int i = 0; i + 1 < g.nu; ++i) {
      std::size_t a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      out << "f " << corner(a) << ' ' << corner(b) << ' ' << corner(c) << '\n';
      out << "f " << corner(a) << ' ' << corner(c) << ' ' << corner(d) << '\n';
    }
  if (!out) throw Error("write failed: " + path);
}

inline void write_invariants_csv(const Grid& g, const std::vector<BasicInvariants>& inv, const std::string& path) {
  auto out = open_for_write(path);
  out << "u,v";
  for (const char* n : BasicInvariants::names) out << ',' << n;
  out << ",J,K,H,detG\n";
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      const BasicInvariants& b = inv[g.index(i, j)];
      CurvatureTriple c = curvature(b);
      out << g.u(i) << ',' << g.v(j);
      for (double x : b.as_array()) out << ',' << x;
      out << ',' << c.J << ',' << c.K << ',' << c.H << ',' << (b.a1 * b.b2 - b.a2 * b.b1) << '\n';
    }
  if (!out) throw Error("write failed: " + path);
}

inline void write_curvature_csv(const Grid& g, const std::vector<BasicInvariants>& inv, double tol,
                                const std::string& path) {
  auto out = open_for_write(path);
  out << "u,v,J,K,H,class\n";
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      const BasicInvariants& b = inv[g.index(i, j)];
      CurvatureTriple c = curvature(b);
      out << g.u(i) << ',' << g.v(j) << ',' << c.J << ',' << c.K << ',' << c.H << ','
          << to_string(classify_front(b, tol)) << '\n';
    }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace framed
