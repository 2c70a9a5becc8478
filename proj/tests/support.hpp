#pragma once

#include <cmath>
#include <random>
#include <string>

#include "framed/framed.hpp"

namespace testsupport {

using namespace framed;

inline std::string scene_path(const std::string& file) { return std::string(FRAMED_SCENE_DIR) + "/" + file; }

inline const Scene& cuspidal_edge_scene() {
  static const Scene s = load_scene(scene_path("cuspidal_edge.json"));
  return s;
}
inline const Scene& helicoid_scene() {
  static const Scene s = load_scene(scene_path("helicoid_family.json"));
  return s;
}
inline const Scene& crosscap_scene() {
  static const Scene s = load_scene(scene_path("cuspidal_crosscap.json"));
  return s;
}

inline const SurfaceDef& cuspidal_edge() { return cuspidal_edge_scene().surface("cuspidal_edge"); }
inline const SurfaceDef& helicoid_family() { return helicoid_scene().surface("helicoid_family"); }
inline const SurfaceDef& crosscap() { return crosscap_scene().surface("cuspidal_crosscap"); }

inline Domain square(double a = -1, double b = 1) { return Domain{a, b, a, b, 0, 0}; }

inline SurfaceDef plane() {
  return SurfaceDef::from_strings("plane", {"u", "v", "0"}, {"0", "0", "1"}, {"1", "0", "0"}, square());
}

// Constant map with the sphere frame: G vanishes identically, K = cos v.
inline SurfaceDef point_sphere() {
  return SurfaceDef::from_strings("point", {"0", "0", "0"}, {"cos(v)*cos(u)", "cos(v)*sin(u)", "sin(v)"},
                                  {"-sin(u)", "cos(u)", "0"}, square());
}

inline std::string num(double x) { return "(" + detail::format_number(x) + ")"; }

// Graph of a random cubic h with n = (-h_u, -h_v, 1)/|.| and s = (1, 0, h_u)/|.|.
inline SurfaceDef random_graph(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-0.6, 0.6);
  const char* monomials[] = {"u", "v", "u^2", "u*v", "v^2", "u^3", "u^2*v", "u*v^2", "v^3"};
  const char* du[] = {"1", "0", "2*u", "v", "0", "3*u^2", "2*u*v", "v^2", "0"};
  const char* dv[] = {"0", "1", "0", "u", "2*v", "0", "u^2", "2*u*v", "3*v^2"};
  std::string h = "0", hu = "0", hv = "0";
  for (int k = 0; k < 9; ++k) {
    std::string a = num(c(rng));
    h += " + " + a + "*" + monomials[k];
    hu += " + " + a + "*" + du[k];
    hv += " + " + a + "*" + dv[k];
  }
  std::string nn = "sqrt(1 + (" + hu + ")^2 + (" + hv + ")^2)";
  std::string ns = "sqrt(1 + (" + hu + ")^2)";
  return SurfaceDef::from_strings("graph", {"u", "v", h}, {"-(" + hu + ")/" + nn, "-(" + hv + ")/" + nn, "1/" + nn},
                                  {"1/" + ns, "0", "(" + hu + ")/" + ns}, square());
}

inline std::string random_theta_text(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.5, 1.5);
  return num(c(rng)) + " + " + num(c(rng)) + "*u + " + num(c(rng)) + "*v^2 + " + num(c(rng)) + "*sin(u*v)";
}

inline BasicInvariants random_invariants(std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  std::array<double, 10> a;
  for (auto& x : a) x = d(rng);
  return BasicInvariants::from_array(a);
}

inline double sqrt2() { return std::sqrt(2.0); }

}  // namespace testsupport
