#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bryant4/analytic.hpp"
#include "bryant4/lorentz.hpp"

namespace bryant4 {

// Dense complex polynomial, coefficients in increasing degree order.
// Trailing coefficients below a relative floor are trimmed so degree()
// reflects the numerically meaningful leading term.
class PolyC {
 public:
  PolyC() = default;
  explicit PolyC(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(); }
  static PolyC constant(Complex v) { return PolyC({v}); }
  static PolyC monomial(int degree, Complex lead = 1.0);

  bool is_zero() const { return c_.empty(); }
  int degree() const { return c_.empty() ? -1 : int(c_.size()) - 1; }
  Complex coeff(int k) const {
    return (k >= 0 && k < int(c_.size())) ? c_[size_t(k)] : Complex{};
  }
  Complex lead() const { return c_.empty() ? Complex{} : c_.back(); }
  const std::vector<Complex>& coeffs() const { return c_; }

  Complex eval(Complex z) const;
  PolyC derivative() const;

  PolyC operator+(const PolyC& o) const;
  PolyC operator-(const PolyC& o) const;
  PolyC operator*(const PolyC& o) const;
  PolyC operator*(Complex s) const;

  // Quotient and remainder of *this by d.
  std::pair<PolyC, PolyC> divrem(const PolyC& d) const;

  double max_abs_coeff() const;

  // All complex roots via the Durand-Kerner simultaneous iteration.
  // Throws RootFindingFailure on non-convergence.
  std::vector<Complex> roots() const;

  // Resultant normalized by leading-coefficient powers; near zero iff the
  // polynomials share a root.
  static Complex resultant_normalized(const PolyC& p, const PolyC& q);

 private:
  void trim();
  std::vector<Complex> c_;
};

struct RootOrder {
  Complex location;
  int order;     // multiplicity
  bool is_pole;  // root of the denominator
};

struct Rect {
  double xmin, xmax, ymin, ymax;
  bool contains(Complex z) const {
    return z.real() >= xmin && z.real() <= xmax && z.imag() >= ymin && z.imag() <= ymax;
  }
};

// Zeros of p and poles (zeros of q) of the rational function p/q inside
// the rectangle, with multiplicities from root clustering. Requires p, q
// coprime (normalized resultant above coprime_eps).
std::vector<RootOrder> rational_orders(const PolyC& p, const PolyC& q, const Rect& rect,
                                       double coprime_eps = 1e-10);

// Expands an expression into polynomial coefficients when it is (an
// arithmetic combination equivalent to) a polynomial of bounded degree.
std::optional<PolyC> to_polynomial(const Expr& e, int max_degree = 64);

// Normalizes an expression into a ratio of coprime-up-to-cancellation
// polynomials. Fails on exp and on degree blowup.
std::optional<std::pair<PolyC, PolyC>> to_rational(const Expr& e, int max_degree = 64);

}  // namespace bryant4
