#include "bryant4/analytic.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "bryant4/errors.hpp"

namespace bryant4 {

ExprPtr Expr::node(Kind kind, Complex value, long exponent,
                   std::vector<Complex> coeffs, ExprPtr l, ExprPtr r) {
  Expr* e = new Expr();
  e->kind_ = kind;
  e->value_ = value;
  e->exponent_ = exponent;
  e->coeffs_ = std::move(coeffs);
  e->left_ = std::move(l);
  e->right_ = std::move(r);
  return ExprPtr(e);
}

// -- factories ---------------------------------------------------------

ExprPtr Expr::constant(Complex value) {
  return node(Kind::Const, value, 0, {}, nullptr, nullptr);
}

ExprPtr Expr::variable() { return node(Kind::Var, {}, 0, {}, nullptr, nullptr); }

ExprPtr Expr::add(ExprPtr l, ExprPtr r) {
  if (l->is_const() && r->is_const()) return constant(l->const_value() + r->const_value());
  if (l->is_const(0.0)) return r;
  if (r->is_const(0.0)) return l;
  return node(Kind::Add, {}, 0, {}, std::move(l), std::move(r));
}

ExprPtr Expr::sub(ExprPtr l, ExprPtr r) {
  if (l->is_const() && r->is_const()) return constant(l->const_value() - r->const_value());
  if (r->is_const(0.0)) return l;
  return node(Kind::Sub, {}, 0, {}, std::move(l), std::move(r));
}

ExprPtr Expr::mul(ExprPtr l, ExprPtr r) {
  if (l->is_const() && r->is_const()) return constant(l->const_value() * r->const_value());
  if (l->is_const(0.0) || r->is_const(0.0)) return constant(0.0);
  if (l->is_const(1.0)) return r;
  if (r->is_const(1.0)) return l;
  return node(Kind::Mul, {}, 0, {}, std::move(l), std::move(r));
}

ExprPtr Expr::div(ExprPtr l, ExprPtr r) {
  if (l->is_const(0.0)) return constant(0.0);
  if (r->is_const(1.0)) return l;
  if (l->is_const() && r->is_const() && r->const_value() != 0.0)
    return constant(l->const_value() / r->const_value());
  return node(Kind::Div, {}, 0, {}, std::move(l), std::move(r));
}

ExprPtr Expr::pow(ExprPtr base, long exponent) {
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return base;
  if (base->is_const()) return constant(std::pow(base->const_value(), Complex(double(exponent))));
  return node(Kind::Pow, {}, exponent, {}, std::move(base), nullptr);
}

ExprPtr Expr::exp(ExprPtr arg) {
  if (arg->is_const()) return constant(std::exp(arg->const_value()));
  return node(Kind::Exp, {}, 0, {}, std::move(arg), nullptr);
}

ExprPtr Expr::poly(std::vector<Complex> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.empty()) return constant(0.0);
  if (coeffs.size() == 1) return constant(coeffs[0]);
  return node(Kind::Poly, {}, 0, std::move(coeffs), nullptr, nullptr);
}

// -- evaluation --------------------------------------------------------

Complex Expr::eval(Complex z, double pole_eps) const {
  switch (kind_) {
    case Kind::Const: return value_;
    case Kind::Var: return z;
    case Kind::Add: return left_->eval(z, pole_eps) + right_->eval(z, pole_eps);
    case Kind::Sub: return left_->eval(z, pole_eps) - right_->eval(z, pole_eps);
    case Kind::Mul: return left_->eval(z, pole_eps) * right_->eval(z, pole_eps);
    case Kind::Div: {
      Complex den = right_->eval(z, pole_eps);
      if (std::abs(den) < pole_eps)
        throw numeric_error("PoleProximity", "evaluation too close to a pole");
      return left_->eval(z, pole_eps) / den;
    }
    case Kind::Pow: {
      Complex base = left_->eval(z, pole_eps);
      if (exponent_ < 0 && std::abs(base) < pole_eps)
        throw numeric_error("PoleProximity", "evaluation too close to a pole");
      Complex acc(1.0);
      long n = exponent_ < 0 ? -exponent_ : exponent_;
      Complex b = base;
      while (n > 0) {  // square-and-multiply keeps integer powers exact-ish
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
      }
      return exponent_ < 0 ? 1.0 / acc : acc;
    }
    case Kind::Exp: return std::exp(left_->eval(z, pole_eps));
    case Kind::Poly: {
      Complex acc = coeffs_.back();
      for (size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + coeffs_[k];
      return acc;
    }
  }
  return {};
}

// -- differentiation ---------------------------------------------------

ExprPtr Expr::derivative() const {
  switch (kind_) {
    case Kind::Const: return constant(0.0);
    case Kind::Var: return constant(1.0);
    case Kind::Add: return add(left_->derivative(), right_->derivative());
    case Kind::Sub: return sub(left_->derivative(), right_->derivative());
    case Kind::Mul:
      return add(mul(left_->derivative(), right_), mul(left_, right_->derivative()));
    case Kind::Div:
      return div(sub(mul(left_->derivative(), right_), mul(left_, right_->derivative())),
                 pow(right_, 2));
    case Kind::Pow:
      return mul(mul(constant(double(exponent_)), pow(left_, exponent_ - 1)),
                 left_->derivative());
    case Kind::Exp: return mul(exp(left_), left_->derivative());
    case Kind::Poly: {
      std::vector<Complex> d;
      for (size_t k = 1; k < coeffs_.size(); ++k) d.push_back(double(k) * coeffs_[k]);
      return poly(std::move(d));
    }
  }
  return constant(0.0);
}

// -- printing ----------------------------------------------------------

namespace {

std::string fmt_complex(Complex v) {
  std::ostringstream os;
  os.precision(17);
  if (v.imag() == 0.0) {
    os << v.real();
  } else if (v.real() == 0.0) {
    os << "(" << v.imag() << "*i)";
  } else {
    os << "(" << v.real() << "+" << v.imag() << "*i)";
  }
  return os.str();
}

}  // namespace

std::string Expr::to_string() const {
  switch (kind_) {
    case Kind::Const: return fmt_complex(value_);
    case Kind::Var: return "z";
    case Kind::Add: return "(" + left_->to_string() + "+" + right_->to_string() + ")";
    case Kind::Sub: return "(" + left_->to_string() + "-" + right_->to_string() + ")";
    case Kind::Mul: return "(" + left_->to_string() + "*" + right_->to_string() + ")";
    case Kind::Div: return "(" + left_->to_string() + "/" + right_->to_string() + ")";
    case Kind::Pow: return "(" + left_->to_string() + "^" + std::to_string(exponent_) + ")";
    case Kind::Exp: return "exp(" + left_->to_string() + ")";
    case Kind::Poly: {
      std::string s = fmt_complex(coeffs_[0]);
      for (size_t k = 1; k < coeffs_.size(); ++k)
        s = "(" + s + "+" + fmt_complex(coeffs_[k]) + "*z^" + std::to_string(k) + ")";
      return s;
    }
  }
  return "";
}

// -- parser ------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr parse() {
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw validation_error("SyntaxError",
                           what + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    for (;;) {
      if (eat('+')) {
        e = Expr::add(e, parse_term());
      } else if (eat('-')) {
        e = Expr::sub(e, parse_term());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (eat('*')) {
        e = Expr::mul(e, parse_unary());
      } else if (eat('/')) {
        e = Expr::div(e, parse_unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_unary() {
    if (eat('-')) return Expr::sub(Expr::constant(0.0), parse_unary());
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (eat('^')) {
      bool neg = false;
      skip_ws();
      if (eat('-')) neg = true;
      skip_ws();
      size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected integer exponent");
      long n = std::stol(std::string(src_.substr(start, pos_ - start)));
      return Expr::pow(base, neg ? -n : n);
    }
    return base;
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isalnum(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
      std::string name(src_.substr(start, pos_ - start));
      if (name == "z") return Expr::variable();
      if (name == "i") return Expr::constant(Complex(0.0, 1.0));
      if (name == "exp") {
        if (!eat('(')) fail("expected '(' after exp");
        ExprPtr arg = parse_sum();
        if (!eat(')')) fail("expected ')'");
        return Expr::exp(arg);
      }
      pos_ = start;
      throw validation_error("UnknownIdentifier", "unknown identifier '" + name +
                                                      "' at position " + std::to_string(start));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belonged to something else
      }
    }
    if (pos_ == start) fail("expected number");
    return Expr::constant(Complex(std::stod(std::string(src_.substr(start, pos_ - start)))));
  }

  std::string_view src_;
  size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expression(std::string_view src) { return Parser(src).parse(); }

}  // namespace bryant4
