#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"

namespace framed {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Num, U, V, Pi, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Num;
  double num = 0;
  std::string fn;  // function name for Call
  std::vector<NodePtr> args;
  // Source span, 0-based half-open; begin == end for built nodes.
  std::size_t begin = 0, end = 0;
};

namespace detail {

inline int function_arity(std::string_view name) {
  if (name == "atan2") return 2;
  if (name == "sin" || name == "cos" || name == "tan" || name == "sqrt" || name == "abs" || name == "exp" ||
      name == "log")
    return 1;
  return -1;
}

inline std::string format_number(double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

inline std::string node_string(const Node& n) {
  using K = Node::Kind;
  auto bin = [&](const char* op) {
    return "(" + node_string(*n.args[0]) + " " + op + " " + node_string(*n.args[1]) + ")";
  };
  switch (n.kind) {
    case K::Num: {
      std::string s = format_number(n.num);
      return n.num < 0 ? "(" + s + ")" : s;
    }
    case K::U: return "u";
    case K::V: return "v";
    case K::Pi: return "pi";
    case K::Neg: return "(-" + node_string(*n.args[0]) + ")";
    case K::Add: return bin("+");
    case K::Sub: return bin("-");
    case K::Mul: return bin("*");
    case K::Div: return bin("/");
    case K::Pow: return bin("^");
    case K::Call: {
      std::string s = n.fn + "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) s += ", ";
        s += node_string(*n.args[i]);
      }
      return s + ")";
    }
  }
  return {};
}

// Recursive descent over: expr = term {(+|-) term}; term = unary {(*|/) unary};
// unary = (-|+) unary | power; power = primary [^ unary]; primary = number | name | name(args) | (expr).
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ < src_.size()) fail("operator or end of input");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& expected) const { throw SyntaxError(pos_ + 1, expected); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  static std::shared_ptr<Node> make(Node::Kind k, std::vector<NodePtr> args, std::size_t b, std::size_t e) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->args = std::move(args);
    n->begin = b;
    n->end = e;
    return n;
  }

  NodePtr expr() {
    skip_ws();
    std::size_t b = pos_;
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        NodePtr rhs = term();
        lhs = make(Node::Kind::Add, {lhs, rhs}, b, pos_);
      } else if (accept('-')) {
        NodePtr rhs = term();
        lhs = make(Node::Kind::Sub, {lhs, rhs}, b, pos_);
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    skip_ws();
    std::size_t b = pos_;
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        NodePtr rhs = unary();
        lhs = make(Node::Kind::Mul, {lhs, rhs}, b, pos_);
      } else if (accept('/')) {
        NodePtr rhs = unary();
        lhs = make(Node::Kind::Div, {lhs, rhs}, b, pos_);
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    skip_ws();
    std::size_t b = pos_;
    if (accept('-')) {
      NodePtr a = unary();
      return make(Node::Kind::Neg, {a}, b, pos_);
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    skip_ws();
    std::size_t b = pos_;
    NodePtr base = primary();
    if (accept('^')) {
      NodePtr ex = unary();  // right-associative, allows 2^-1
      return make(Node::Kind::Pow, {base, ex}, b, pos_);
    }
    return base;
  }

  NodePtr primary() {
    skip_ws();
    std::size_t b = pos_;
    if (pos_ >= src_.size()) fail("number, variable, function or '('");
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      std::string name(src_.substr(b, pos_ - b));
      if (peek('(')) {
        int arity = function_arity(name);
        if (arity < 0) {
          pos_ = b;
          fail("known function (sin, cos, tan, atan2, sqrt, abs, exp, log)");
        }
        accept('(');
        std::vector<NodePtr> args;
        args.push_back(expr());
        while (accept(',')) args.push_back(expr());
        if (!accept(')')) fail(static_cast<int>(args.size()) < arity ? "','" : "')'");
        if (static_cast<int>(args.size()) != arity) {
          pos_ = b;
          fail(name + " with " + std::to_string(arity) + " argument(s)");
        }
        auto n = make(Node::Kind::Call, std::move(args), b, pos_);
        n->fn = name;
        return n;
      }
      if (name == "u") return make(Node::Kind::U, {}, b, pos_);
      if (name == "v") return make(Node::Kind::V, {}, b, pos_);
      if (name == "pi") return make(Node::Kind::Pi, {}, b, pos_);
      pos_ = b;
      fail("variable u, v or constant pi");
    }
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("')'");
      return e;
    }
    fail("number, variable, function or '('");
  }

  NodePtr number() {
    std::size_t b = pos_;
    double value = 0;
    auto [p, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), value);
    if (ec != std::errc()) fail("number");
    pos_ = static_cast<std::size_t>(p - src_.data());
    auto n = make(Node::Kind::Num, {}, b, pos_);
    n->num = value;
    return n;
  }
};

}  // namespace detail

class Expr {
 public:
  Expr() : Expr(constant(0)) {}

  static Expr parse(std::string_view text) {
    detail::Parser p(text);
    NodePtr root = p.parse_all();
    return Expr(std::move(root), std::make_shared<const std::string>(text));
  }

  static Expr constant(double c) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Num;
    n->num = c;
    return Expr(n, nullptr);
  }
  static Expr var_u() { return leaf(Node::Kind::U); }
  static Expr var_v() { return leaf(Node::Kind::V); }

  // Combine subexpressions into a new node; used by the builder operators.
  static Expr node(Node::Kind k, std::vector<Expr> args, std::string fn = {}) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->fn = std::move(fn);
    for (auto& a : args) n->args.push_back(a.root_);
    return Expr(n, nullptr);
  }

  const NodePtr& root() const { return root_; }

  // Original text when parsed, a canonical fully parenthesized rendering otherwise.
  std::string to_string() const { return source_ ? *source_ : detail::node_string(*root_); }
  std::string canonical() const { return detail::node_string(*root_); }

  Jet1 eval_jet(double u, double v) const { return eval_node(*root_, u, v); }
  double eval(double u, double v) const { return eval_jet(u, v).value; }

 private:
  NodePtr root_;
  std::shared_ptr<const std::string> source_;

  Expr(NodePtr r, std::shared_ptr<const std::string> src) : root_(std::move(r)), source_(std::move(src)) {}

  static Expr leaf(Node::Kind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return Expr(n, nullptr);
  }

  [[noreturn]] void raise(const Node& n, const std::string& what) const {
    std::string text = (source_ && n.end > n.begin) ? source_->substr(n.begin, n.end - n.begin)
                                                    : detail::node_string(n);
    throw EvalError(what, text, source_ ? n.begin + 1 : 0);
  }

  Jet1 eval_node(const Node& n, double u, double v) const {
    using K = Node::Kind;
    Jet1 r;
    switch (n.kind) {
      case K::Num: return {n.num, 0, 0};
      case K::U: return {u, 1, 0};
      case K::V: return {v, 0, 1};
      case K::Pi: return {std::numbers::pi, 0, 0};
      case K::Neg: return -eval_node(*n.args[0], u, v);
      case K::Add: r = eval_node(*n.args[0], u, v) + eval_node(*n.args[1], u, v); break;
      case K::Sub: r = eval_node(*n.args[0], u, v) - eval_node(*n.args[1], u, v); break;
      case K::Mul: r = eval_node(*n.args[0], u, v) * eval_node(*n.args[1], u, v); break;
      case K::Div: {
        Jet1 a = eval_node(*n.args[0], u, v), b = eval_node(*n.args[1], u, v);
        if (b.value == 0) raise(n, "division by zero");
        r = a / b;
        break;
      }
      case K::Pow: r = eval_pow(n, u, v); break;
      case K::Call: r = eval_call(n, u, v); break;
    }
    if (!std::isfinite(r.value) || !std::isfinite(r.du) || !std::isfinite(r.dv)) raise(n, "non-finite result");
    return r;
  }

  Jet1 eval_pow(const Node& n, double u, double v) const {
    Jet1 b = eval_node(*n.args[0], u, v), e = eval_node(*n.args[1], u, v);
    if (e.du == 0 && e.dv == 0) {
      double p = e.value;
      if (p == std::round(p) && std::abs(p) <= 1024) {
        if (p < 0 && b.value == 0) raise(n, "zero raised to a negative power");
        return ipow(b, static_cast<int>(p));
      }
      if (b.value < 0) raise(n, "negative base with non-integer exponent");
      if (b.value == 0) {
        if (p > 1 || (p > 0 && b.du == 0 && b.dv == 0)) return {0, 0, 0};
        raise(n, "power not differentiable at zero base");
      }
      return pow(b, p);
    }
    if (b.value <= 0) raise(n, "non-positive base with variable exponent");
    return pow(b, e);
  }

  Jet1 eval_call(const Node& n, double u, double v) const {
    Jet1 a = eval_node(*n.args[0], u, v);
    const std::string& f = n.fn;
    if (f == "sin") return sin(a);
    if (f == "cos") return cos(a);
    if (f == "tan") {
      if (std::cos(a.value) == 0) raise(n, "tan pole");
      return tan(a);
    }
    if (f == "exp") return exp(a);
    if (f == "log") {
      if (a.value <= 0) raise(n, "log of non-positive value");
      return log(a);
    }
    if (f == "sqrt") {
      if (a.value < 0) raise(n, "sqrt of negative value");
      if (a.value == 0 && (a.du != 0 || a.dv != 0)) raise(n, "sqrt not differentiable at zero");
      return sqrt(a);
    }
    if (f == "abs") return abs(a);
    if (f == "atan2") {
      Jet1 x = eval_node(*n.args[1], u, v);
      if (a.value == 0 && x.value == 0) raise(n, "atan2(0, 0)");
      return atan2(a, x);
    }
    raise(n, "unknown function");
  }
};

inline Expr parse(std::string_view text) { return Expr::parse(text); }

inline Expr operator+(const Expr& a, const Expr& b) { return Expr::node(Node::Kind::Add, {a, b}); }
inline Expr operator-(const Expr& a, const Expr& b) { return Expr::node(Node::Kind::Sub, {a, b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::node(Node::Kind::Mul, {a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return Expr::node(Node::Kind::Div, {a, b}); }
inline Expr operator-(const Expr& a) { return Expr::node(Node::Kind::Neg, {a}); }
inline Expr operator*(double k, const Expr& a) { return Expr::constant(k) * a; }
inline Expr pow(const Expr& a, const Expr& b) { return Expr::node(Node::Kind::Pow, {a, b}); }
inline Expr call(const std::string& fn, const Expr& a) { return Expr::node(Node::Kind::Call, {a}, fn); }
inline Expr call(const std::string& fn, const Expr& a, const Expr& b) {
  return Expr::node(Node::Kind::Call, {a, b}, fn);
}

}  // namespace framed
