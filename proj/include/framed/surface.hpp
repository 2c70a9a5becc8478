#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "core.hpp"
#include "expr.hpp"
#include "jet.hpp"

namespace framed {

// Position and frame with first partials.
struct FrameJet {
  VecJet x, n, s;
  VecJet t() const { return cross(n, s); }
};

using FramedField = std::function<FrameJet(double, double)>;
using ScalarField = std::function<Jet1(double, double)>;

inline ScalarField scalar_field(const Expr& e) {
  return [e](double u, double v) { return e.eval_jet(u, v); };
}

inline ScalarField constant_field(double c) {
  return [c](double, double) { return Jet1{c, 0, 0}; };
}

// Angle given by an expression, by a (sin, cos) expression pair, or by any callable.
class AngleField {
 public:
  AngleField() : AngleField(Expr::constant(0)) {}
  explicit AngleField(Expr theta) : expr_(std::move(theta)) {
    Expr e = *expr_;
    fn_ = [e](double u, double v) { return e.eval_jet(u, v); };
  }
  AngleField(Expr sin_theta, Expr cos_theta) : pair_(std::make_pair(sin_theta, cos_theta)) {
    fn_ = [sin_theta, cos_theta](double u, double v) {
      Jet1 s = sin_theta.eval_jet(u, v), c = cos_theta.eval_jet(u, v);
      if (s.value == 0 && c.value == 0) throw EvalError("sin and cos both vanish", "angle", 0);
      return atan2(s, c);
    };
  }
  static AngleField from_function(ScalarField f, std::string label) {
    AngleField a;
    a.expr_.reset();
    a.fn_ = std::move(f);
    a.label_ = std::move(label);
    return a;
  }
  static AngleField constant(double c) { return AngleField(Expr::constant(c)); }

  Jet1 operator()(double u, double v) const { return fn_(u, v); }

  AngleField negated() const {
    auto f = fn_;
    return from_function([f](double u, double v) { return -f(u, v); }, "-(" + describe() + ")");
  }
  AngleField shifted(double delta) const {
    auto f = fn_;
    return from_function([f, delta](double u, double v) { return f(u, v) + delta; },
                         describe() + " + " + detail::format_number(delta));
  }

  const std::optional<Expr>& expr() const { return expr_; }
  const std::optional<std::pair<Expr, Expr>>& sin_cos() const { return pair_; }
  std::string describe() const {
    if (expr_) return expr_->to_string();
    if (pair_) return "atan2(" + pair_->first.to_string() + ", " + pair_->second.to_string() + ")";
    return label_;
  }
  ScalarField function() const { return fn_; }

 private:
  std::optional<Expr> expr_;
  std::optional<std::pair<Expr, Expr>> pair_;
  ScalarField fn_;
  std::string label_;
};

struct SurfaceDef {
  std::string name;
  std::array<Expr, 3> x, n, s;
  Domain domain;

  FrameJet eval(double u, double v) const {
    auto vec = [&](const std::array<Expr, 3>& c) {
      return make_vecjet(c[0].eval_jet(u, v), c[1].eval_jet(u, v), c[2].eval_jet(u, v));
    };
    return {vec(x), vec(n), vec(s)};
  }
  FramedField field() const {
    SurfaceDef copy = *this;
    return [copy](double u, double v) { return copy.eval(u, v); };
  }

  static SurfaceDef from_strings(std::string name, const std::array<std::string, 3>& x,
                                 const std::array<std::string, 3>& n, const std::array<std::string, 3>& s,
                                 const Domain& d) {
    SurfaceDef S;
    S.name = std::move(name);
    for (int i = 0; i < 3; ++i) {
      S.x[i] = parse(x[i]);
      S.n[i] = parse(n[i]);
      S.s[i] = parse(s[i]);
    }
    S.domain = d;
    return S;
  }
};

}  // namespace framed
