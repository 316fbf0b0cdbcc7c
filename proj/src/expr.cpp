#include "socp/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace socp {

namespace {

Expr make(Op op, Expr a = nullptr, Expr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_num(const Expr& e) { return e->op == Op::Const; }

double apply_fn(Op fn, double v) {
  switch (fn) {
    case Op::Sin: return std::sin(v);
    case Op::Cos: return std::cos(v);
    case Op::Exp: return std::exp(v);
    case Op::Log: return v > 0.0 ? std::log(v) : std::numeric_limits<double>::quiet_NaN();
    case Op::Sqrt: return v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
    default: throw std::logic_error("apply_fn: not a function node");
  }
}

const char* fn_name(Op fn) {
  switch (fn) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    default: return "?";
  }
}

class Parser {
 public:
  Parser(const std::string& text, std::size_t n) : s_(text), n_(n) {}

  Expr run() {
    skip();
    if (pos_ == s_.size()) throw ParseError(pos_, "empty expression");
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) throw ParseError(pos_, std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr e = prod();
    for (;;) {
      if (accept('+')) e = add(e, prod());
      else if (accept('-')) e = sub(e, prod());
      else return e;
    }
  }

  Expr prod() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = mul(e, unary());
      else if (accept('/')) e = div(e, unary());
      else return e;
    }
  }

  Expr unary() {
    if (accept('-')) return neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (!accept('^')) return base;
    skip();
    const std::size_t at = pos_;
    Expr ex = unary();
    if (!is_num(ex) || ex->value != std::nearbyint(ex->value) || std::abs(ex->value) > 1e6)
      throw ParseError(at, "exponent must be an integer constant");
    return pow(base, static_cast<int>(ex->value));
  }

  Expr atom() {
    skip();
    if (pos_ >= s_.size()) throw ParseError(pos_, "unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError(pos_, std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const char* first = s_.data() + start;
    const char* last = s_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw ParseError(start, "malformed number '" + s_.substr(start, pos_ - start) + "'");
    return constant(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string id = s_.substr(start, pos_ - start);

    static const std::pair<const char*, Op> fns[] = {
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt}};
    for (const auto& [name, op] : fns) {
      if (id != name) continue;
      if (!accept('(')) throw ParseError(pos_, "expected '(' after " + id);
      Expr arg = sum();
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',')
        throw ParseError(pos_, "function '" + id + "' takes exactly one argument");
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return socp::apply(op, arg);
    }

    if (id.size() >= 2 && id[0] == 'x') {
      bool digits = true;
      for (std::size_t k = 1; k < id.size(); ++k) digits = digits && std::isdigit(static_cast<unsigned char>(id[k]));
      if (digits && id[1] != '0') {
        const std::size_t k = std::stoul(id.substr(1));
        if (k >= 1 && k <= n_) return variable(k - 1);
        throw ParseError(start, "variable " + id + " out of range (n = " + std::to_string(n_) + ")");
      }
    }
    throw ParseError(start, "unknown identifier '" + id + "'");
  }

  const std::string& s_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, std::size_t n) { return Parser(text, n).run(); }

Expr constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

Expr variable(std::size_t i) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->index = i;
  return n;
}

bool is_const(const Expr& e, double v) { return e->op == Op::Const && e->value == v; }

Expr add(const Expr& a, const Expr& b) {
  if (is_num(a) && is_num(b)) return constant(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (b->op == Op::Neg) return sub(a, b->a);
  return make(Op::Add, a, b);
}

Expr sub(const Expr& a, const Expr& b) {
  if (is_num(a) && is_num(b)) return constant(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(b);
  if (b->op == Op::Neg) return add(a, b->a);
  return make(Op::Sub, a, b);
}

Expr mul(const Expr& a, const Expr& b) {
  if (is_num(a) && is_num(b)) return constant(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(b);
  if (is_const(b, -1.0)) return neg(a);
  if (a->op == Op::Neg) return neg(mul(a->a, b));
  if (b->op == Op::Neg) return neg(mul(a, b->a));
  if (is_num(b)) return make(Op::Mul, b, a);
  return make(Op::Mul, a, b);
}

Expr div(const Expr& a, const Expr& b) {
  if (is_num(a) && is_num(b)) return constant(a->value / b->value);
  if (is_const(a, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  return make(Op::Div, a, b);
}

Expr neg(const Expr& a) {
  if (is_num(a)) return constant(-a->value);
  if (a->op == Op::Neg) return a->a;
  return make(Op::Neg, a);
}

Expr pow(const Expr& a, int k) {
  if (k == 0) return constant(1.0);
  if (k == 1) return a;
  if (is_num(a)) return constant(std::pow(a->value, k));
  if (a->op == Op::Pow) return pow(a->a, a->exponent * k);
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Pow;
  n->exponent = k;
  n->a = a;
  return n;
}

Expr apply(Op fn, const Expr& a) {
  if (fn != Op::Sin && fn != Op::Cos && fn != Op::Exp && fn != Op::Log && fn != Op::Sqrt)
    throw std::invalid_argument("apply: not a function");
  if (is_num(a)) return constant(apply_fn(fn, a->value));
  return make(fn, a);
}

double evaluate(const Expr& e, std::span<const double> x) {
  switch (e->op) {
    case Op::Const: return e->value;
    case Op::Var: return x[e->index];
    case Op::Add: return evaluate(e->a, x) + evaluate(e->b, x);
    case Op::Sub: return evaluate(e->a, x) - evaluate(e->b, x);
    case Op::Mul: return evaluate(e->a, x) * evaluate(e->b, x);
    case Op::Div: return evaluate(e->a, x) / evaluate(e->b, x);
    case Op::Neg: return -evaluate(e->a, x);
    case Op::Pow: return std::pow(evaluate(e->a, x), e->exponent);
    default: return apply_fn(e->op, evaluate(e->a, x));
  }
}

Expr differentiate(const Expr& e, std::size_t var) {
  switch (e->op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(e->index == var ? 1.0 : 0.0);
    case Op::Add: return add(differentiate(e->a, var), differentiate(e->b, var));
    case Op::Sub: return sub(differentiate(e->a, var), differentiate(e->b, var));
    case Op::Mul:
      return add(mul(differentiate(e->a, var), e->b), mul(e->a, differentiate(e->b, var)));
    case Op::Div: {
      const Expr da = differentiate(e->a, var);
      const Expr db = differentiate(e->b, var);
      return sub(div(da, e->b), div(mul(e->a, db), pow(e->b, 2)));
    }
    case Op::Neg: return neg(differentiate(e->a, var));
    case Op::Pow:
      return mul(mul(constant(e->exponent), pow(e->a, e->exponent - 1)), differentiate(e->a, var));
    case Op::Sin: return mul(socp::apply(Op::Cos, e->a), differentiate(e->a, var));
    case Op::Cos: return neg(mul(socp::apply(Op::Sin, e->a), differentiate(e->a, var)));
    case Op::Exp: return mul(e, differentiate(e->a, var));
    case Op::Log: return div(differentiate(e->a, var), e->a);
    case Op::Sqrt: return div(differentiate(e->a, var), mul(constant(2.0), e));
  }
  return constant(0.0);
}

std::string to_string(const Expr& e) {
  switch (e->op) {
    case Op::Const: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e->value);
      return e->value < 0.0 ? "(" + std::string(buf) + ")" : std::string(buf);
    }
    case Op::Var: return "x" + std::to_string(e->index + 1);
    case Op::Add: return "(" + to_string(e->a) + " + " + to_string(e->b) + ")";
    case Op::Sub: return "(" + to_string(e->a) + " - " + to_string(e->b) + ")";
    case Op::Mul: return "(" + to_string(e->a) + " * " + to_string(e->b) + ")";
    case Op::Div: return "(" + to_string(e->a) + " / " + to_string(e->b) + ")";
    case Op::Neg: return "(-" + to_string(e->a) + ")";
    case Op::Pow: return "(" + to_string(e->a) + "^" + std::to_string(e->exponent) + ")";
    default: return std::string(fn_name(e->op)) + "(" + to_string(e->a) + ")";
  }
}

}  // namespace socp
