#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bryant4/lorentz.hpp"

namespace bryant4 {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree for a meromorphic function of one complex
// variable. Differentiation is exact (symbolic); the smart constructors
// fold constants and drop unit/zero factors so derivative trees stay small.
class Expr {
 public:
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Exp, Poly };

  static ExprPtr constant(Complex value);
  static ExprPtr variable();
  static ExprPtr add(ExprPtr l, ExprPtr r);
  static ExprPtr sub(ExprPtr l, ExprPtr r);
  static ExprPtr mul(ExprPtr l, ExprPtr r);
  static ExprPtr div(ExprPtr l, ExprPtr r);
  static ExprPtr pow(ExprPtr base, long exponent);
  static ExprPtr exp(ExprPtr arg);
  // Coefficients in increasing degree order.
  static ExprPtr poly(std::vector<Complex> coeffs);

  Kind kind() const { return kind_; }
  Complex const_value() const { return value_; }
  long exponent() const { return exponent_; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  const ExprPtr& left() const { return left_; }
  const ExprPtr& right() const { return right_; }

  // Throws PoleProximity when a divisor magnitude falls below pole_eps.
  Complex eval(Complex z, double pole_eps = 1e-12) const;

  ExprPtr derivative() const;

  std::string to_string() const;

  bool is_const() const { return kind_ == Kind::Const; }
  bool is_const(Complex v) const { return kind_ == Kind::Const && value_ == v; }

 private:
  Expr() = default;

  static ExprPtr node(Kind kind, Complex value, long exponent,
                      std::vector<Complex> coeffs, ExprPtr l, ExprPtr r);

  Kind kind_ = Kind::Const;
  Complex value_{};
  long exponent_ = 0;
  std::vector<Complex> coeffs_;
  ExprPtr left_, right_;
};

// Recursive-descent parser for the expression grammar:
// identifiers `z` and `i`, decimal literals, operators + - * / ^ (integer
// exponent), function exp, parentheses; whitespace insignificant.
// Throws SyntaxError / UnknownIdentifier with a character position.
ExprPtr parse_expression(std::string_view src);

}  // namespace bryant4
