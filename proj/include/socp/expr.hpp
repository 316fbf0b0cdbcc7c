#pragma once

// Arithmetic expressions over x1..xn with exact symbolic differentiation.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace socp {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op = Op::Const;
  double value = 0.0;     // Const
  std::size_t index = 0;  // Var (0-based)
  int exponent = 0;       // Pow
  Expr a;
  Expr b;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& msg)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + msg), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Grammar: sum := prod (('+'|'-') prod)*; prod := unary (('*'|'/') unary)*;
/// unary := '-' unary | pow; pow := atom ('^' unary)?; atom := number | xK |
/// fn '(' sum ')' | '(' sum ')'. Exponents must fold to an integer constant.
Expr parse_expr(const std::string& text, std::size_t n);

// Simplifying constructors.
Expr constant(double v);
Expr variable(std::size_t i);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr pow(const Expr& a, int k);
Expr apply(Op fn, const Expr& a);

bool is_const(const Expr& e, double v);

/// Evaluates at x; log of x <= 0 and sqrt of x < 0 give NaN.
double evaluate(const Expr& e, std::span<const double> x);
Expr differentiate(const Expr& e, std::size_t var);
std::string to_string(const Expr& e);

}  // namespace socp
