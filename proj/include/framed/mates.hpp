#pragma once

#include <algorithm>
#include <cctype>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "invariants.hpp"
#include "sampled.hpp"
#include "surface.hpp"

namespace framed {

// (v, w-bar) pair: the mate sits at distance lambda along v and its frame vector w-bar equals v.
enum class MateKind { NN, NS, NT, SN, SS, ST, TN, TS, TT };

inline const char* to_string(MateKind k) {
  static const char* names[] = {"nn", "ns", "nt", "sn", "ss", "st", "tn", "ts", "tt"};
  return names[static_cast<int>(k)];
}

inline MateKind parse_mate_kind(const std::string& s) {
  static const std::map<std::string, MateKind> kinds = {
      {"nn", MateKind::NN}, {"ns", MateKind::NS}, {"nt", MateKind::NT}, {"sn", MateKind::SN}, {"ss", MateKind::SS},
      {"st", MateKind::ST}, {"tn", MateKind::TN}, {"ts", MateKind::TS}, {"tt", MateKind::TT}};
  auto it = kinds.find(s);
  if (it == kinds.end()) throw SpecError("unknown mate kind '" + s + "'");
  return it->second;
}

inline bool kind_uses_theta(MateKind k) { return k != MateKind::NN; }
inline bool kind_is_involute(MateKind k) { return k == MateKind::SN || k == MateKind::TN; }

constexpr double kGateTol = 1e-6;
constexpr double kLambdaZeroTol = 1e-12;
constexpr double kJetStep = 1e-3;

struct MateSpec {
  std::string name;
  std::string surface;
  MateKind kind = MateKind::NN;
  std::optional<Expr> lambda;
  std::optional<AngleField> theta;
  std::optional<std::pair<double, double>> base;
  double c = 0;
};

// Mate position and frame from the base jets and the jets of lambda, theta.
inline FrameJet mate_frame(MateKind kind, const FrameJet& b, const Jet1& lam, const Jet1& th) {
  Jet1 c = cos(th), s = sin(th);
  const VecJet &n = b.n, &sv = b.s;
  VecJet t = b.t();
  switch (kind) {
    case MateKind::NN: return {b.x + lam * n, n, sv};
    case MateKind::NS: return {b.x + lam * n, s * sv + c * t, n};
    case MateKind::NT: return {b.x + lam * n, c * sv - s * t, s * sv + c * t};
    case MateKind::SN: return {b.x + lam * sv, sv, c * t - s * n};
    case MateKind::SS: return {b.x + lam * sv, s * t + c * n, sv};
    case MateKind::ST: return {b.x + lam * sv, c * t - s * n, s * t + c * n};
    case MateKind::TN: return {b.x + lam * t, t, c * n - s * sv};
    case MateKind::TS: return {b.x + lam * t, s * n + c * sv, t};
    case MateKind::TT: return {b.x + lam * t, c * n - s * sv, s * n + c * sv};
  }
  return b;
}

// Closed-form basic invariants of the mate in terms of the base invariants and
// the jets of lambda and theta.
inline BasicInvariants predict_mate_invariants(MateKind kind, const BasicInvariants& inv, const Jet1& lam,
                                               const Jet1& th) {
  const double L = lam.value, c = std::cos(th.value), s = std::sin(th.value);
  struct Row {
    double a, b, e, f, g;
  };
  auto row = [&](double a, double b, double e, double f, double g, double Li, double Ti) -> Row {
    switch (kind) {
      case MateKind::NN: return {a + L * e, b + L * f, e, f, g};
      case MateKind::NS:
        return {Li, (a + L * e) * c - (b + L * f) * s, -e * s - f * c, Ti - g, e * c - f * s};
      case MateKind::NT:
        return {(a + L * e) * s + (b + L * f) * c, Li, g - Ti, -e * c + f * s, -e * s - f * c};
      case MateKind::SN:
        return {(b + L * g) * c + L * e * s, (b + L * g) * s - L * e * c, e * s + g * c, -e * c + g * s, -f - Ti};
      case MateKind::SS:
        return {a + Li, (b + L * g) * c + L * e * s, -g * s + e * c, Ti + f, g * c + e * s};
      case MateKind::ST:
        return {-L * e * c + (b + L * g) * s, a + Li, -Ti - f, -g * c - e * s, -g * s + e * c};
      case MateKind::TN:
        return {-(a - L * g) * s - L * f * c, (a - L * g) * c - L * f * s, -f * c + g * s, -f * s - g * c, e - Ti};
      case MateKind::TS:
        return {b + Li, -L * f * c - (a - L * g) * s, f * s + g * c, Ti - e, -f * c + g * s};
      case MateKind::TT:
        return {-L * f * s + (a - L * g) * c, b + Li, e - Ti, f * c - g * s, f * s + g * c};
    }
    return {};
  };
  Row r1 = row(inv.a1, inv.b1, inv.e1, inv.f1, inv.g1, lam.du, th.du);
  Row r2 = row(inv.a2, inv.b2, inv.e2, inv.f2, inv.g2, lam.dv, th.dv);
  return {r1.a, r1.b, r2.a, r2.b, r1.e, r1.f, r1.g, r2.e, r2.f, r2.g};
}

struct ConditionResidual {
  double r1 = 0, r2 = 0;
  double gate = 0;  // det(b, g) for SN, det(g, a) for TN, otherwise 0
  double max_abs() const { return std::max({std::abs(r1), std::abs(r2), std::abs(gate)}); }
};

// Row residuals of the existence condition of each kind. They equal the
// tangency defects x-bar_u . n-bar and x-bar_v . n-bar of the mate.
inline ConditionResidual condition_residual(MateKind kind, const BasicInvariants& inv, const Jet1& lam,
                                            const Jet1& th) {
  const double L = lam.value, c = std::cos(th.value), s = std::sin(th.value);
  auto row = [&](double a, double b, double e, double f, double g) {
    switch (kind) {
      case MateKind::NS: return (a + L * e) * s + (b + L * f) * c;
      case MateKind::NT: return (a + L * e) * c - (b + L * f) * s;
      case MateKind::SS: return (b + L * g) * s - L * e * c;
      case MateKind::ST: return (b + L * g) * c + L * e * s;
      case MateKind::TS: return (a - L * g) * c - L * f * s;
      case MateKind::TT: return (a - L * g) * s + L * f * c;
      default: return 0.0;
    }
  };
  switch (kind) {
    case MateKind::NN: return {lam.du, lam.dv, 0};
    case MateKind::SN: return {lam.du + inv.a1, lam.dv + inv.a2, inv.b1 * inv.g2 - inv.b2 * inv.g1};
    case MateKind::TN: return {lam.du + inv.b1, lam.dv + inv.b2, inv.g1 * inv.a2 - inv.g2 * inv.a1};
    default:
      return {row(inv.a1, inv.b1, inv.e1, inv.f1, inv.g1), row(inv.a2, inv.b2, inv.e2, inv.f2, inv.g2), 0};
  }
}

inline ConditionResidual condition_residual(const BasicInvariants& inv, const MateSpec& spec, double u, double v) {
  if (!spec.lambda) throw SpecError("mate '" + spec.name + "' (" + to_string(spec.kind) + ") needs a lambda field");
  if (kind_uses_theta(spec.kind) && !kind_is_involute(spec.kind) && !spec.theta)
    throw SpecError("mate '" + spec.name + "' (" + to_string(spec.kind) + ") needs a theta field");
  Jet1 th = spec.theta ? (*spec.theta)(u, v) : Jet1{};
  return condition_residual(spec.kind, inv, spec.lambda->eval_jet(u, v), th);
}

// ---------------------------------------------------------------------------
// Constructed mates

struct MateResult {
  std::string label;
  MateKind kind = MateKind::NN;
  FramedField field;
  ScalarField lambda;
  AngleField theta;
  SampledSurface samples;
  std::vector<BasicInvariants> predicted;
  std::vector<BasicInvariants> recomputed;
  std::vector<ConditionResidual> condition;
  std::vector<double> lambda_values, theta_values;
  double max_frame_defect = 0;
  double max_prediction_error = 0;
  double max_condition = 0;
  double max_gate = 0;

  const Grid& grid() const { return samples.grid; }
};

inline FramedField make_mate_field(MateKind kind, FramedField base, ScalarField lam, AngleField th) {
  return [kind, base = std::move(base), lam = std::move(lam), th = std::move(th)](double u, double v) {
    return mate_frame(kind, base(u, v), lam(u, v), th(u, v));
  };
}

// Reject lambda identically (numerically) zero on some grid cell.
inline void require_lambda_nonzero(const Grid& g, const std::vector<double>& lam, const std::string& label) {
  for (int j = 0; j + 1 < g.nv; ++j)
    for (int i = 0; i + 1 < g.nu; ++i) {
      bool all_zero = std::abs(lam[g.index(i, j)]) <= kLambdaZeroTol &&
                      std::abs(lam[g.index(i + 1, j)]) <= kLambdaZeroTol &&
                      std::abs(lam[g.index(i, j + 1)]) <= kLambdaZeroTol &&
                      std::abs(lam[g.index(i + 1, j + 1)]) <= kLambdaZeroTol;
      if (all_zero)
        throw SpecError(label + ": lambda vanishes on the grid cell at (" + std::to_string(g.u(i)) + ", " +
                        std::to_string(g.v(j)) + ")");
    }
}

inline MateResult build_mate(std::string label, MateKind kind, const FramedField& base, ScalarField lam,
                             AngleField th, const Grid& g) {
  MateResult r;
  r.label = std::move(label);
  r.kind = kind;
  r.lambda = lam;
  r.theta = th;
  r.field = make_mate_field(kind, base, lam, th);
  r.samples = SampledSurface{g, std::vector<FramePoint>(g.size())};
  r.predicted.resize(g.size());
  r.recomputed.resize(g.size());
  r.condition.resize(g.size());
  r.lambda_values.resize(g.size());
  r.theta_values.resize(g.size());
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      double u = g.u(i), v = g.v(j);
      std::size_t k = g.index(i, j);
      FrameJet B = base(u, v);
      Jet1 L = lam(u, v), T = th(u, v);
      FrameJet M = mate_frame(kind, B, L, T);
      BasicInvariants inv = raw_invariants(B);
      r.samples.points[k] = {M.x.value, M.n.value, M.s.value};
      r.predicted[k] = predict_mate_invariants(kind, inv, L, T);
      r.recomputed[k] = raw_invariants(M);
      r.condition[k] = condition_residual(kind, inv, L, T);
      r.lambda_values[k] = L.value;
      r.theta_values[k] = T.value;
      r.max_frame_defect = std::max(r.max_frame_defect, frame_defect(M));
      r.max_prediction_error = std::max(r.max_prediction_error, max_abs_diff(r.predicted[k], r.recomputed[k]));
      r.max_condition = std::max({r.max_condition, std::abs(r.condition[k].r1), std::abs(r.condition[k].r2)});
      r.max_gate = std::max(r.max_gate, std::abs(r.condition[k].gate));
    }
  require_lambda_nonzero(g, r.lambda_values, r.label);
  return r;
}

// Parallel (n, n-bar)-mate at constant distance.
inline MateResult parallel_mate(const FramedField& base, const Grid& g, double lambda) {
  if (lambda == 0) throw SpecError("parallel mate needs lambda != 0");
  return build_mate("parallel", MateKind::NN, base, constant_field(lambda), AngleField::constant(0), g);
}

// ---------------------------------------------------------------------------
// Caustics

struct CausticRoots {
  std::vector<double> roots;  // ascending
  bool all_lambda = false;
};

// Real roots of det(G + lambda [e f]) = K lambda^2 - 2 H lambda + J.
inline CausticRoots solve_caustic_lambda(const BasicInvariants& inv) {
  CurvatureTriple c = curvature(inv);
  const double K = c.K, H = c.H, J = c.J;
  const double scale = std::max({std::abs(K), std::abs(H), std::abs(J)});
  CausticRoots out;
  if (scale <= 1e-14) {
    out.all_lambda = true;
    return out;
  }
  if (std::abs(K) <= 1e-13 * scale) {
    if (std::abs(H) <= 1e-13 * scale) return out;  // nonzero constant J: no root
    out.roots.push_back(J / (2 * H));
    return out;
  }
  double disc = H * H - K * J;
  if (disc < 0) {
    if (disc < -1e-14 * std::max(H * H, std::abs(K * J))) return out;
    disc = 0;
  }
  double q = H + (H >= 0 ? 1.0 : -1.0) * std::sqrt(disc);
  if (q == 0) {
    out.roots = {0.0, 0.0};
    return out;
  }
  double r1 = q / K, r2 = J / q;
  out.roots = {std::min(r1, r2), std::max(r1, r2)};
  return out;
}

// Pick theta + k pi closest to prev.
inline double align_half_turn(double theta, double prev) {
  double k = std::round((prev - theta) / std::numbers::pi);
  return theta + k * std::numbers::pi;
}

// Seed representative in (-pi/2, pi/2].
inline double seed_half_turn(double theta) {
  double t = align_half_turn(theta, 0.0);
  if (t <= -std::numbers::pi / 2) t += std::numbers::pi;
  if (t > std::numbers::pi / 2) t -= std::numbers::pi;
  return t;
}

// theta with (G + lambda [e f]) (sin theta, cos theta)^T = 0.
inline double solve_caustic_theta(const BasicInvariants& inv, double lambda, std::optional<double> prev = {}) {
  const std::array<double, 2> p = {inv.a1 + lambda * inv.e1, inv.a2 + lambda * inv.e2};
  const std::array<double, 2> q = {inv.b1 + lambda * inv.f1, inv.b2 + lambda * inv.f2};
  const double n0 = std::hypot(p[0], q[0]), n1 = std::hypot(p[1], q[1]);
  const double scale = std::max(n0, n1);
  if (scale <= 1e-12) return prev.value_or(0.0);
  const int k = n0 >= n1 ? 0 : 1, o = 1 - k;
  double theta = std::atan2(-q[k], p[k]);
  double other = p[o] * std::sin(theta) + q[o] * std::cos(theta);
  if (std::abs(other) > 1e-7 * std::max(1.0, scale))
    throw NoThetaError("caustic condition has no common kernel (rank 2), row residual " + std::to_string(other));
  return prev ? align_half_turn(theta, *prev) : seed_half_turn(theta);
}

// Five-point central differences for a value-only field.
template <class F>
Jet1 jet_from_values(const F& f, double u, double v, double h = kJetStep) {
  auto d = [&](double fp2, double fp1, double fm1, double fm2) { return (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h); };
  return {f(u, v), d(f(u + 2 * h, v), f(u + h, v), f(u - h, v), f(u - 2 * h, v)),
          d(f(u, v + 2 * h), f(u, v + h), f(u, v - h), f(u, v - 2 * h))};
}

// A continuous root branch of the caustic equation tracked over a grid.
class CausticBranch {
 public:
  CausticBranch(FramedField base, const Grid& g) : base_(std::move(base)), grid_(g) { track(); }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& lambda_nodes() const { return lambda_; }
  const std::vector<double>& theta_nodes() const { return theta_; }

  double lambda_value(double u, double v) const {
    std::size_t k;
    if (node_at(u, v, k)) return lambda_[k];
    double ref = lambda_[nearest(u, v)];
    CausticRoots r = solve_caustic_lambda(raw_invariants(base_(u, v)));
    if (r.all_lambda) return ref;
    if (r.roots.empty())
      throw BranchError("no real caustic root at (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    return closest(r.roots, ref);
  }

  double theta_value(double u, double v) const {
    std::size_t k;
    if (node_at(u, v, k)) return theta_[k];
    return solve_caustic_theta(raw_invariants(base_(u, v)), lambda_value(u, v), theta_[nearest(u, v)]);
  }

  ScalarField lambda_field() const {
    auto self = std::make_shared<CausticBranch>(*this);
    return [self](double u, double v) {
      return jet_from_values([&](double a, double b) { return self->lambda_value(a, b); }, u, v);
    };
  }
  ScalarField theta_field() const {
    auto self = std::make_shared<CausticBranch>(*this);
    return [self](double u, double v) {
      return jet_from_values([&](double a, double b) { return self->theta_value(a, b); }, u, v);
    };
  }

 private:
  FramedField base_;
  Grid grid_;
  std::vector<double> lambda_, theta_;

  static double closest(const std::vector<double>& roots, double ref) {
    return *std::min_element(roots.begin(), roots.end(),
                             [ref](double a, double b) { return std::abs(a - ref) < std::abs(b - ref); });
  }
  std::size_t nearest(double u, double v) const { return grid_.index(grid_.nearest_i(u), grid_.nearest_j(v)); }
  bool node_at(double u, double v, std::size_t& k) const {
    int i = grid_.nearest_i(u), j = grid_.nearest_j(v);
    if (grid_.u(i) != u || grid_.v(j) != v) return false;
    k = grid_.index(i, j);
    return true;
  }

  void track() {
    const Grid& g = grid_;
    lambda_.assign(g.size(), 0);
    theta_.assign(g.size(), 0);
    std::vector<char> hole(g.size(), 0);
    std::vector<BasicInvariants> inv(g.size());
    std::optional<double> ref;
    for (int j = 0; j < g.nv; ++j)
      for (int i = 0; i < g.nu; ++i) {
        std::size_t k = g.index(i, j);
        inv[k] = raw_invariants(base_(g.u(i), g.v(j)));
        if (i > 0) ref = lambda_[g.index(i - 1, j)];
        else if (j > 0) ref = lambda_[g.index(0, j - 1)];
        CausticRoots r = solve_caustic_lambda(inv[k]);
        if (r.all_lambda) {
          hole[k] = 1;
          lambda_[k] = ref.value_or(0.0);
          continue;
        }
        if (r.roots.empty())
          throw BranchError("no continuous caustic branch: no real root at (" + std::to_string(g.u(i)) + ", " +
                            std::to_string(g.v(j)) + ")");
        if (!ref) {
          lambda_[k] = std::abs(r.roots.front()) <= std::abs(r.roots.back()) ? r.roots.front() : r.roots.back();
        } else {
          lambda_[k] = closest(r.roots, *ref);
        }
      }
    // Fill isolated degenerate nodes from their neighbours.
    for (int j = 0; j < g.nv; ++j)
      for (int i = 0; i < g.nu; ++i) {
        if (!hole[g.index(i, j)]) continue;
        double sum = 0;
        int cnt = 0;
        const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          int a = i + di[d], b = j + dj[d];
          if (a < 0 || b < 0 || a >= g.nu || b >= g.nv) continue;
          if (hole[g.index(a, b)])
            throw BranchError("degenerate caustic equation on a region around (" + std::to_string(g.u(i)) + ", " +
                              std::to_string(g.v(j)) + ")");
          sum += lambda_[g.index(a, b)];
          ++cnt;
        }
        lambda_[g.index(i, j)] = cnt ? sum / cnt : 0.0;
      }
    std::optional<double> prev;
    for (int j = 0; j < g.nv; ++j)
      for (int i = 0; i < g.nu; ++i) {
        std::size_t k = g.index(i, j);
        if (i > 0) prev = theta_[g.index(i - 1, j)];
        else if (j > 0) prev = theta_[g.index(0, j - 1)];
        theta_[k] = solve_caustic_theta(inv[k], lambda_[k], prev);
      }
  }
};

enum class Variant { S, T };

inline MateResult check_gate(MateResult r, double tol, const std::string& what) {
  if (!(r.max_condition <= tol))
    throw GateError(what + ": condition residual " + std::to_string(r.max_condition) + " exceeds " +
                    std::to_string(tol));
  return r;
}

// Caustic with lambda, theta solved from the invariants. The t variant uses the
// s solution with theta shifted by -pi/2.
inline MateResult caustic(const FramedField& base, const Grid& g, Variant variant) {
  CausticBranch br(base, g);
  AngleField th = AngleField::from_function(br.theta_field(), "solved");
  if (variant == Variant::T) th = th.shifted(-std::numbers::pi / 2);
  return build_mate(variant == Variant::S ? "caustic_s" : "caustic_t",
                    variant == Variant::S ? MateKind::NS : MateKind::NT, base, br.lambda_field(), th, g);
}

// Caustic with prescribed lambda, theta; the condition is verified.
inline MateResult caustic(const FramedField& base, const Grid& g, Variant variant, ScalarField lam, AngleField th,
                          double tol = kGateTol) {
  MateKind k = variant == Variant::S ? MateKind::NS : MateKind::NT;
  return check_gate(build_mate(variant == Variant::S ? "caustic_s" : "caustic_t", k, base, std::move(lam),
                               std::move(th), g),
                    tol, "caustic");
}

// ---------------------------------------------------------------------------
// Involutes

namespace detail {

// Composite Simpson on [a, b] with n (even) subintervals.
template <class F>
double simpson(const F& f, double a, double b, int n = 4) {
  double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return acc * h / 3;
}

// Nodes of the axis g (count, accessor) split [from, to]; each piece gets 4 Simpson subintervals.
template <class F, class Node>
double integrate_line(const F& f, double from, double to, int count, const Node& node) {
  if (from == to) return 0;
  std::vector<double> cuts{from};
  if (to > from) {
    for (int k = 0; k < count; ++k)
      if (node(k) > from && node(k) < to) cuts.push_back(node(k));
  } else {
    for (int k = count - 1; k >= 0; --k)
      if (node(k) < from && node(k) > to) cuts.push_back(node(k));
  }
  cuts.push_back(to);
  double acc = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) acc += simpson(f, cuts[k], cuts[k + 1]);
  return acc;
}

}  // namespace detail

// Involute distance: c - (integral of a2(u0, .) along v from v0, then of a1(., v) along u
// from u0); with b1, b2 for the t variant. Derivatives are exact: (-a1, -a2) under the gate.
class InvoluteLambda {
 public:
  InvoluteLambda(FramedField base, const Grid& g, Variant variant, double u0, double v0, double c)
      : base_(std::move(base)), grid_(g), variant_(variant), u0_(u0), v0_(v0), c_(c) {
    fill_grid();
  }

  double value(double u, double v) const {
    int i = grid_.nearest_i(u), j = grid_.nearest_j(v);
    if (grid_.u(i) == u && grid_.v(j) == v) return nodes_[grid_.index(i, j)];
    return c_ - (spine(v) + row(u, v));
  }

  Jet1 operator()(double u, double v) const {
    auto [A1, A2] = integrands(u, v);
    return {value(u, v), -A1, -A2};
  }

  const std::vector<double>& nodes() const { return nodes_; }

 private:
  FramedField base_;
  Grid grid_;
  Variant variant_;
  double u0_, v0_, c_;
  std::vector<double> nodes_;

  std::pair<double, double> integrands(double u, double v) const {
    BasicInvariants i = raw_invariants(base_(u, v));
    return variant_ == Variant::S ? std::make_pair(i.a1, i.a2) : std::make_pair(i.b1, i.b2);
  }
  double spine(double v) const {
    return detail::integrate_line([&](double s) { return integrands(u0_, s).second; }, v0_, v, grid_.nv,
                                  [&](int k) { return grid_.v(k); });
  }
  double row(double u, double v) const {
    return detail::integrate_line([&](double s) { return integrands(s, v).first; }, u0_, u, grid_.nu,
                                  [&](int k) { return grid_.u(k); });
  }

  // Cumulative sweeps outward from the base point, piece by piece, so each node
  // costs one piece instead of a full path.
  static std::vector<double> cumulative(const std::function<double(double)>& f, double start, int count,
                                        const std::function<double(int)>& node) {
    std::vector<double> out(static_cast<std::size_t>(count), 0.0);
    double prev = start, acc = 0;
    for (int k = 0; k < count; ++k) {
      if (node(k) < start) continue;
      if (node(k) == start) {
        out[k] = 0;
        continue;
      }
      acc += detail::simpson(f, prev, node(k));
      out[k] = acc;
      prev = node(k);
    }
    prev = start;
    acc = 0;
    for (int k = count - 1; k >= 0; --k) {
      if (node(k) >= start) continue;
      acc += detail::simpson(f, prev, node(k));
      out[k] = acc;
      prev = node(k);
    }
    return out;
  }

  void fill_grid() {
    const Grid& g = grid_;
    nodes_.assign(g.size(), 0);
    auto sp = cumulative([&](double s) { return integrands(u0_, s).second; }, v0_, g.nv,
                         [&](int k) { return g.v(k); });
    for (int j = 0; j < g.nv; ++j) {
      double vj = g.v(j);
      auto rw = cumulative([&](double s) { return integrands(s, vj).first; }, u0_, g.nu,
                           [&](int k) { return g.u(k); });
      for (int i = 0; i < g.nu; ++i) nodes_[g.index(i, j)] = c_ - (sp[j] + rw[i]);
    }
  }
};

inline MateResult involute(const FramedField& base, const Grid& g, Variant variant, const AngleField& theta,
                           std::pair<double, double> base_point, double c = 0, double gate_tol = kGateTol) {
  MateKind kind = variant == Variant::S ? MateKind::SN : MateKind::TN;
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      BasicInvariants inv = raw_invariants(base(g.u(i), g.v(j)));
      double det = variant == Variant::S ? inv.b1 * inv.g2 - inv.b2 * inv.g1 : inv.g1 * inv.a2 - inv.g2 * inv.a1;
      if (!(std::abs(det) <= gate_tol))
        throw GateError(std::string("involute gate ") + (variant == Variant::S ? "det(b, g)" : "det(g, a)") +
                        " = " + std::to_string(det) + " at (" + std::to_string(g.u(i)) + ", " +
                        std::to_string(g.v(j)) + ")");
    }
  auto lam = std::make_shared<InvoluteLambda>(base, g, variant, base_point.first, base_point.second, c);
  ScalarField lf = [lam](double u, double v) { return (*lam)(u, v); };
  return build_mate(variant == Variant::S ? "involute_s" : "involute_t", kind, base, lf, theta, g);
}

// ---------------------------------------------------------------------------
// Tangential-direction mates: S^t is the (s, t-bar)-mate, T^s the (t, s-bar)-mate.

inline MateResult tangential(const FramedField& base, const Grid& g, MateKind kind, ScalarField lam,
                             AngleField theta, double tol = kGateTol) {
  if (kind != MateKind::ST && kind != MateKind::TS) throw SpecError("tangential mates are of kind st or ts");
  return check_gate(build_mate(kind == MateKind::ST ? "tangential_st" : "tangential_ts", kind, base,
                               std::move(lam), std::move(theta), g),
                    tol, "tangential");
}

// Any kind from a MateSpec: caustics solve lambda, theta when it omits lambda;
// involutes integrate lambda; the rest use the prescribed fields and verify the condition.
inline MateResult construct_mate(const MateSpec& spec, const FramedField& base, const Grid& g,
                                 double tol = kGateTol) {
  auto bp = spec.base.value_or(std::make_pair(g.domain.u0, g.domain.v0));
  AngleField th = spec.theta.value_or(AngleField::constant(0));
  MateResult r;
  switch (spec.kind) {
    case MateKind::NS:
    case MateKind::NT: {
      Variant var = spec.kind == MateKind::NS ? Variant::S : Variant::T;
      if (!spec.lambda) {
        r = caustic(base, g, var);
      } else {
        if (!spec.theta) throw SpecError("mate '" + spec.name + "' needs theta");
        r = caustic(base, g, var, scalar_field(*spec.lambda), th, tol);
      }
      break;
    }
    case MateKind::SN:
    case MateKind::TN:
      r = involute(base, g, spec.kind == MateKind::SN ? Variant::S : Variant::T, th, bp, spec.c, tol);
      break;
    case MateKind::NN: {
      if (!spec.lambda) throw SpecError("mate '" + spec.name + "' needs lambda");
      r = check_gate(build_mate(spec.name, spec.kind, base, scalar_field(*spec.lambda), th, g), tol,
                     "parallel mate (lambda must be constant)");
      break;
    }
    default: {
      if (!spec.lambda) throw SpecError("mate '" + spec.name + "' needs lambda");
      if (!spec.theta) throw SpecError("mate '" + spec.name + "' needs theta");
      r = check_gate(build_mate(spec.name, spec.kind, base, scalar_field(*spec.lambda), th, g), tol,
                     std::string("mate ") + to_string(spec.kind));
    }
  }
  if (!spec.name.empty()) r.label = spec.name;
  return r;
}

// ---------------------------------------------------------------------------
// Composition identities

enum class Pipeline { CsIs, IsCs, TsSt, StTs, CtIt, ItCt };

inline const char* to_string(Pipeline p) {
  static const char* names[] = {"CsIs", "IsCs", "TsSt", "StTs", "CtIt", "ItCt"};
  return names[static_cast<int>(p)];
}

inline Pipeline parse_pipeline(std::string s) {
  // Letters only, so "Cs∘Is", "Cs o Is" style spellings also work.
  std::string clean;
  for (char ch : s)
    if (std::isalpha(static_cast<unsigned char>(ch)) && ch != 'o') clean += ch;
  static const std::map<std::string, Pipeline> names = {{"CsIs", Pipeline::CsIs}, {"IsCs", Pipeline::IsCs},
                                                        {"TsSt", Pipeline::TsSt}, {"StTs", Pipeline::StTs},
                                                        {"CtIt", Pipeline::CtIt}, {"ItCt", Pipeline::ItCt}};
  auto it = names.find(clean);
  if (it == names.end()) throw SpecError("unknown pipeline '" + s + "'");
  return it->second;
}

struct ComposeParams {
  AngleField theta;                      // first-stage theta
  std::optional<ScalarField> lambda;     // first-stage lambda (tangential pipelines)
  double c = 0;                          // involute offset
  std::optional<std::pair<double, double>> base;
  std::optional<ScalarField> lambda2;    // explicit second stage; default is the sign flip
  std::optional<AngleField> theta2;
  std::optional<FramedField> expected;   // default: the result predicted by the identity
  double tol = kGateTol;
};

struct ComposeReport {
  Pipeline pipeline = Pipeline::CsIs;
  double dx = 0, dn = 0, ds = 0;
  double stage1_condition = 0, stage2_condition = 0;
  double max_deviation() const { return std::max({dx, dn, ds}); }
};

inline ComposeReport compose_check(const FramedField& base, const Grid& g, Pipeline p, const ComposeParams& prm) {
  auto bp = prm.base.value_or(std::make_pair(g.domain.u0, g.domain.v0));
  auto neg = [](ScalarField f) -> ScalarField { return [f](double u, double v) { return -f(u, v); }; };
  MateResult first, second;
  FramedField expected = prm.expected.value_or(base);
  switch (p) {
    case Pipeline::CsIs:
    case Pipeline::CtIt: {
      Variant var = p == Pipeline::CsIs ? Variant::S : Variant::T;
      first = involute(base, g, var, prm.theta, bp, prm.c, prm.tol);
      ScalarField l2 = prm.lambda2.value_or(neg(first.lambda));
      AngleField t2 = prm.theta2.value_or(prm.theta.negated());
      second = caustic(first.field, g, var, l2, t2, prm.tol);
      break;
    }
    case Pipeline::IsCs:
    case Pipeline::ItCt: {
      Variant var = p == Pipeline::IsCs ? Variant::S : Variant::T;
      first = caustic(base, g, var);
      AngleField t2 = prm.theta2.value_or(first.theta.negated());
      second = involute(first.field, g, var, t2, bp, 0, prm.tol);
      if (!prm.expected) {
        double l0 = first.lambda(bp.first, bp.second).value;
        expected = [base, l0](double u, double v) {
          FrameJet F = base(u, v);
          return FrameJet{F.x + Jet1{l0, 0, 0} * F.n, F.n, F.s};
        };
      }
      break;
    }
    case Pipeline::TsSt:
    case Pipeline::StTs: {
      if (!prm.lambda) throw SpecError("tangential pipelines need a first-stage lambda");
      MateKind k1 = p == Pipeline::TsSt ? MateKind::ST : MateKind::TS;
      MateKind k2 = p == Pipeline::TsSt ? MateKind::TS : MateKind::ST;
      first = tangential(base, g, k1, *prm.lambda, prm.theta, prm.tol);
      second = tangential(first.field, g, k2, prm.lambda2.value_or(neg(*prm.lambda)),
                          prm.theta2.value_or(prm.theta.negated()), prm.tol);
      break;
    }
  }
  ComposeReport rep;
  rep.pipeline = p;
  rep.stage1_condition = first.max_condition;
  rep.stage2_condition = second.max_condition;
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      const FramePoint& q = second.samples.at(i, j);
      FrameJet E = expected(g.u(i), g.v(j));
      rep.dx = std::max(rep.dx, norm(q.x - E.x.value));
      rep.dn = std::max(rep.dn, norm(q.n - E.n.value));
      rep.ds = std::max(rep.ds, norm(q.s - E.s.value));
    }
  return rep;
}

}  // namespace framed
