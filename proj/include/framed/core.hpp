#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "errors.hpp"

namespace framed {

constexpr double kFrameTol = 1e-9;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double k) {
    x *= k; y *= k; z *= k;
    return *this;
  }
  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double k, Vec3 a) { return a *= k; }
constexpr Vec3 operator*(Vec3 a, double k) { return a *= k; }
constexpr Vec3 operator/(Vec3 a, double k) { return {a.x / k, a.y / k, a.z / k}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

inline double max_abs(const Vec3& a) {
  return std::max({std::abs(a.x), std::abs(a.y), std::abs(a.z)});
}

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{};

  static Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  // Matrix whose columns are c0, c1, c2.
  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    return Mat3{{c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z}};
  }
  double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
  double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }

  Mat3 transpose() const {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
    return t;
  }
  double det() const {
    const auto& a = *this;
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  }
};

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0;
      for (int k = 0; k < 3; ++k) acc += a(i, k) * b(k, j);
      r(i, j) = acc;
    }
  return r;
}

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
          a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
          a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

// Rotation about a unit axis (Rodrigues).
inline Mat3 axis_rotation(const Vec3& axis, double angle) {
  Vec3 k = normalized(axis);
  double c = std::cos(angle), s = std::sin(angle), w = 1 - c;
  return Mat3{{c + k.x * k.x * w, k.x * k.y * w - k.z * s, k.x * k.z * w + k.y * s,
               k.y * k.x * w + k.z * s, c + k.y * k.y * w, k.y * k.z * w - k.x * s,
               k.z * k.x * w - k.y * s, k.z * k.y * w + k.x * s, c + k.z * k.z * w}};
}

// Largest violation of |n|=1, |s|=1, n.s=0.
inline double frame_defect(const Vec3& n, const Vec3& s) {
  return std::max({std::abs(norm(n) - 1), std::abs(norm(s) - 1), std::abs(dot(n, s))});
}

inline Vec3 frame_t(const Vec3& n, const Vec3& s, double tol = kFrameTol) {
  if (std::abs(norm(n) - 1) > tol) throw FrameError("n is not a unit vector (|n| = " + std::to_string(norm(n)) + ")");
  if (std::abs(norm(s) - 1) > tol) throw FrameError("s is not a unit vector (|s| = " + std::to_string(norm(s)) + ")");
  if (std::abs(dot(n, s)) > tol) throw FrameError("n and s are not orthogonal (n.s = " + std::to_string(dot(n, s)) + ")");
  return cross(n, s);
}

struct FrameTriple {
  Vec3 n, s, t;

  static FrameTriple make(const Vec3& n, const Vec3& s, double tol = kFrameTol) {
    return {n, s, frame_t(n, s, tol)};
  }
  // Columns n, s, t.
  Mat3 matrix() const { return Mat3::from_columns(n, s, t); }
};

struct Domain {
  double u_min = 0, u_max = 1, v_min = 0, v_max = 1;
  double u0 = 0, v0 = 0;

  void validate() const {
    if (!(u_min < u_max)) throw SpecError("domain: u_min must be < u_max");
    if (!(v_min < v_max)) throw SpecError("domain: v_min must be < v_max");
    if (u0 < u_min || u0 > u_max || v0 < v_min || v0 > v_max)
      throw SpecError("domain: base point outside the rectangle");
  }
  bool contains(double u, double v) const { return u >= u_min && u <= u_max && v >= v_min && v <= v_max; }
};

struct Grid {
  Domain domain;
  int nu = 2, nv = 2;

  Grid() = default;
  Grid(const Domain& d, int nu_, int nv_) : domain(d), nu(nu_), nv(nv_) {
    if (nu < 2 || nv < 2) throw SpecError("grid needs at least 2 samples per direction");
    domain.validate();
  }
  double du() const { return (domain.u_max - domain.u_min) / (nu - 1); }
  double dv() const { return (domain.v_max - domain.v_min) / (nv - 1); }
  // Last node is pinned to the upper bound so it is exact.
  double u(int i) const { return i == nu - 1 ? domain.u_max : domain.u_min + i * du(); }
  double v(int j) const { return j == nv - 1 ? domain.v_max : domain.v_min + j * dv(); }
  std::size_t size() const { return static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv); }
  // Row-major: rows are constant v.
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nu + i; }
  int nearest_i(double uu) const {
    return std::clamp(static_cast<int>(std::lround((uu - domain.u_min) / du())), 0, nu - 1);
  }
  int nearest_j(double vv) const {
    return std::clamp(static_cast<int>(std::lround((vv - domain.v_min) / dv())), 0, nv - 1);
  }
};

}  // namespace framed
