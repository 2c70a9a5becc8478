#pragma once

#include <cmath>

#include "core.hpp"

namespace framed {

// Value plus both first partials in (u, v).
template <class T>
struct Jet {
  T value{};
  T du{};
  T dv{};

  static Jet constant(const T& c) { return {c, T{}, T{}}; }
};

using Jet1 = Jet<double>;
using VecJet = Jet<Vec3>;

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  return {a.value + b.value, a.du + b.du, a.dv + b.dv};
}
template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return {a.value - b.value, a.du - b.du, a.dv - b.dv};
}
template <class T>
Jet<T> operator-(const Jet<T>& a) {
  return {-a.value, -a.du, -a.dv};
}
// Product rule with a scalar jet; T may be double or Vec3.
template <class T>
Jet<T> operator*(const Jet1& k, const Jet<T>& a) {
  return {k.value * a.value, k.du * a.value + k.value * a.du, k.dv * a.value + k.value * a.dv};
}
inline Jet1 operator*(const Jet1& a, const Jet1& b) {
  return {a.value * b.value, a.du * b.value + a.value * b.du, a.dv * b.value + a.value * b.dv};
}
template <class T>
Jet<T> operator*(double k, const Jet<T>& a) {
  return {k * a.value, k * a.du, k * a.dv};
}
inline Jet1 operator+(const Jet1& a, double c) { return {a.value + c, a.du, a.dv}; }
inline Jet1 operator+(double c, const Jet1& a) { return a + c; }
inline Jet1 operator-(const Jet1& a, double c) { return {a.value - c, a.du, a.dv}; }
inline Jet1 operator-(double c, const Jet1& a) { return {c - a.value, -a.du, -a.dv}; }

inline Jet1 operator/(const Jet1& a, const Jet1& b) {
  double q = a.value / b.value;
  return {q, (a.du - q * b.du) / b.value, (a.dv - q * b.dv) / b.value};
}

inline Jet1 dot(const VecJet& a, const VecJet& b) {
  return {dot(a.value, b.value), dot(a.du, b.value) + dot(a.value, b.du),
          dot(a.dv, b.value) + dot(a.value, b.dv)};
}

inline VecJet cross(const VecJet& a, const VecJet& b) {
  return {cross(a.value, b.value), cross(a.du, b.value) + cross(a.value, b.du),
          cross(a.dv, b.value) + cross(a.value, b.dv)};
}

inline VecJet make_vecjet(const Jet1& x, const Jet1& y, const Jet1& z) {
  return {{x.value, y.value, z.value}, {x.du, y.du, z.du}, {x.dv, y.dv, z.dv}};
}

// Chain rule helper: f(a) with f' given.
inline Jet1 chain(const Jet1& a, double f, double fprime) { return {f, fprime * a.du, fprime * a.dv}; }

inline Jet1 sin(const Jet1& a) { return chain(a, std::sin(a.value), std::cos(a.value)); }
inline Jet1 cos(const Jet1& a) { return chain(a, std::cos(a.value), -std::sin(a.value)); }
inline Jet1 tan(const Jet1& a) {
  double c = std::cos(a.value);
  return chain(a, std::tan(a.value), 1.0 / (c * c));
}
inline Jet1 exp(const Jet1& a) {
  double e = std::exp(a.value);
  return chain(a, e, e);
}
inline Jet1 log(const Jet1& a) { return chain(a, std::log(a.value), 1.0 / a.value); }
inline Jet1 sqrt(const Jet1& a) {
  double r = std::sqrt(a.value);
  if (r == 0) return {0, 0, 0};
  return chain(a, r, 0.5 / r);
}
// Derivative at 0 is taken as 0.
inline Jet1 abs(const Jet1& a) {
  double sg = a.value > 0 ? 1.0 : (a.value < 0 ? -1.0 : 0.0);
  return chain(a, std::abs(a.value), sg);
}
inline Jet1 atan2(const Jet1& y, const Jet1& x) {
  double r2 = x.value * x.value + y.value * y.value;
  return {std::atan2(y.value, x.value), (x.value * y.du - y.value * x.du) / r2,
          (x.value * y.dv - y.value * x.dv) / r2};
}
inline Jet1 ipow(const Jet1& a, int n) {
  if (n == 0) return {1, 0, 0};
  double pn1 = std::pow(a.value, n - 1);
  return chain(a, pn1 * a.value, n * pn1);
}
// Constant real exponent.
inline Jet1 pow(const Jet1& a, double p) {
  if (a.value == 0) return {0, 0, 0};  // caller guarantees p > 1 here
  double pv = std::pow(a.value, p);
  return chain(a, pv, p * pv / a.value);
}
// General a^b = exp(b log a), a > 0.
inline Jet1 pow(const Jet1& a, const Jet1& b) {
  double pv = std::pow(a.value, b.value);
  double la = std::log(a.value);
  return {pv, pv * (b.du * la + b.value * a.du / a.value), pv * (b.dv * la + b.value * a.dv / a.value)};
}

}  // namespace framed
