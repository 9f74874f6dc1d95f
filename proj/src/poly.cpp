#include "bryant4/poly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "bryant4/errors.hpp"

namespace bryant4 {

void PolyC::trim() {
  double scale = 0;
  for (const auto& v : c_) scale = std::max(scale, std::abs(v));
  double floor = scale * 1e-14;
  while (!c_.empty() && std::abs(c_.back()) <= floor) c_.pop_back();
}

PolyC PolyC::monomial(int degree, Complex lead) {
  std::vector<Complex> c(size_t(degree) + 1, Complex{});
  c.back() = lead;
  return PolyC(std::move(c));
}

Complex PolyC::eval(Complex z) const {
  if (c_.empty()) return {};
  Complex acc = c_.back();
  for (size_t k = c_.size() - 1; k-- > 0;) acc = acc * z + c_[k];
  return acc;
}

PolyC PolyC::derivative() const {
  std::vector<Complex> d;
  for (size_t k = 1; k < c_.size(); ++k) d.push_back(double(k) * c_[k]);
  return PolyC(std::move(d));
}

PolyC PolyC::operator+(const PolyC& o) const {
  std::vector<Complex> r(std::max(c_.size(), o.c_.size()), Complex{});
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
  return PolyC(std::move(r));
}

PolyC PolyC::operator-(const PolyC& o) const {
  std::vector<Complex> r(std::max(c_.size(), o.c_.size()), Complex{});
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] -= o.c_[k];
  return PolyC(std::move(r));
}

PolyC PolyC::operator*(const PolyC& o) const {
  if (c_.empty() || o.c_.empty()) return {};
  std::vector<Complex> r(c_.size() + o.c_.size() - 1, Complex{});
  for (size_t a = 0; a < c_.size(); ++a)
    for (size_t b = 0; b < o.c_.size(); ++b) r[a + b] += c_[a] * o.c_[b];
  return PolyC(std::move(r));
}

PolyC PolyC::operator*(Complex s) const {
  std::vector<Complex> r = c_;
  for (auto& v : r) v *= s;
  return PolyC(std::move(r));
}

std::pair<PolyC, PolyC> PolyC::divrem(const PolyC& d) const {
  if (d.is_zero()) throw validation_error("CommonFactor", "division by zero polynomial");
  std::vector<Complex> rem = c_;
  int dd = d.degree();
  int dq = degree() - dd;
  if (dq < 0) return {PolyC{}, *this};
  std::vector<Complex> quo(size_t(dq) + 1, Complex{});
  for (int k = dq; k >= 0; --k) {
    Complex f = rem[size_t(k + dd)] / d.lead();
    quo[size_t(k)] = f;
    for (int j = 0; j <= dd; ++j) rem[size_t(k + j)] -= f * d.coeff(j);
  }
  rem.resize(size_t(dd) > 0 ? size_t(dd) : 0);
  return {PolyC(std::move(quo)), PolyC(std::move(rem))};
}

double PolyC::max_abs_coeff() const {
  double m = 0;
  for (const auto& v : c_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Complex> PolyC::roots() const {
  int n = degree();
  if (n <= 0) return {};
  // Cauchy bound on root magnitude.
  double bound = 0;
  for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(coeff(k) / lead()));
  bound = 1.0 + bound;

  std::vector<Complex> zs(size_t(n), Complex{});
  Complex seed = 0.9 * bound * std::polar(1.0, 0.7);
  Complex rot = std::polar(1.0, 2.0 * M_PI / double(n) + 0.13);
  zs[0] = seed;
  for (int k = 1; k < n; ++k) zs[size_t(k)] = zs[size_t(k - 1)] * rot;

  const int max_iter = 600;
  double scale = max_abs_coeff();
  for (int iter = 0; iter < max_iter; ++iter) {
    double shift = 0;
    for (int k = 0; k < n; ++k) {
      Complex num = eval(zs[size_t(k)]) / lead();
      Complex den = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != k) den *= zs[size_t(k)] - zs[size_t(j)];
      Complex step = num / den;
      zs[size_t(k)] -= step;
      shift = std::max(shift, std::abs(step));
    }
    if (shift < 1e-14 * bound) break;
    if (iter == max_iter - 1) {
      // Multiple roots stall the per-root steps at the roundoff ring; accept
      // when every residual is tiny.
      for (int k = 0; k < n; ++k)
        if (std::abs(eval(zs[size_t(k)])) > 1e-10 * scale * std::pow(bound, n))
          throw numeric_error("RootFindingFailure", "root iteration did not converge");
    }
  }
  return zs;
}

Complex PolyC::resultant_normalized(const PolyC& p, const PolyC& q) {
  int m = p.degree(), n = q.degree();
  if (m < 0 || n < 0) return 0.0;
  if (m == 0 && n == 0) return 1.0;
  // Work with monic copies so the result is scale-free.
  auto monic = [](const PolyC& f) {
    std::vector<Complex> c = f.coeffs();
    for (auto& v : c) v /= f.lead();
    return c;
  };
  std::vector<Complex> a = monic(p), b = monic(q);
  int size = m + n;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(size, size);
  for (int row = 0; row < n; ++row)
    for (int k = 0; k <= m; ++k) s(row, row + (m - k)) = a[size_t(k)];
  for (int row = 0; row < m; ++row)
    for (int k = 0; k <= n; ++k) s(n + row, row + (n - k)) = b[size_t(k)];
  return s.determinant();
}

namespace {

std::vector<RootOrder> cluster_roots(const std::vector<Complex>& raw, bool is_pole,
                                     const Rect& rect) {
  std::vector<RootOrder> out;
  std::vector<bool> used(raw.size(), false);
  // Multiple roots are resolved to ~eps^(1/m); 4th order multiplicities sit
  // near 1e-4, so cluster a bit above that.
  for (size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    std::vector<Complex> cluster{raw[i]};
    used[i] = true;
    double tol = 3e-4 * (1.0 + std::abs(raw[i]));
    for (size_t j = i + 1; j < raw.size(); ++j) {
      if (!used[j] && std::abs(raw[j] - raw[i]) < tol) {
        cluster.push_back(raw[j]);
        used[j] = true;
      }
    }
    Complex center{};
    for (const auto& z : cluster) center += z;
    center /= double(cluster.size());
    if (rect.contains(center)) out.push_back({center, int(cluster.size()), is_pole});
  }
  return out;
}

}  // namespace

std::vector<RootOrder> rational_orders(const PolyC& p, const PolyC& q, const Rect& rect,
                                       double coprime_eps) {
  if (p.degree() > 0 && q.degree() > 0) {
    Complex res = PolyC::resultant_normalized(p, q);
    if (std::abs(res) <= coprime_eps)
      throw validation_error("CommonFactor", "numerator and denominator share a root");
  }
  std::vector<RootOrder> out = cluster_roots(p.roots(), false, rect);
  std::vector<RootOrder> poles = cluster_roots(q.roots(), true, rect);
  out.insert(out.end(), poles.begin(), poles.end());
  std::sort(out.begin(), out.end(), [](const RootOrder& a, const RootOrder& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return out;
}

namespace {

struct RationalForm {
  PolyC num, den;
};

std::optional<RationalForm> rational_of(const Expr& e, int max_degree) {
  auto cap = [max_degree](const RationalForm& f) -> std::optional<RationalForm> {
    if (f.num.degree() > max_degree || f.den.degree() > max_degree) return std::nullopt;
    return f;
  };
  switch (e.kind()) {
    case Expr::Kind::Const:
      return RationalForm{PolyC::constant(e.const_value()), PolyC::constant(1.0)};
    case Expr::Kind::Var:
      return RationalForm{PolyC({0.0, 1.0}), PolyC::constant(1.0)};
    case Expr::Kind::Poly:
      return RationalForm{PolyC(e.coeffs()), PolyC::constant(1.0)};
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      auto l = rational_of(*e.left(), max_degree);
      auto r = rational_of(*e.right(), max_degree);
      if (!l || !r) return std::nullopt;
      PolyC num = e.kind() == Expr::Kind::Add
                      ? l->num * r->den + r->num * l->den
                      : l->num * r->den - r->num * l->den;
      return cap({num, l->den * r->den});
    }
    case Expr::Kind::Mul: {
      auto l = rational_of(*e.left(), max_degree);
      auto r = rational_of(*e.right(), max_degree);
      if (!l || !r) return std::nullopt;
      return cap({l->num * r->num, l->den * r->den});
    }
    case Expr::Kind::Div: {
      auto l = rational_of(*e.left(), max_degree);
      auto r = rational_of(*e.right(), max_degree);
      if (!l || !r || r->num.is_zero()) return std::nullopt;
      return cap({l->num * r->den, l->den * r->num});
    }
    case Expr::Kind::Pow: {
      auto b = rational_of(*e.left(), max_degree);
      if (!b) return std::nullopt;
      long n = e.exponent();
      RationalForm acc{PolyC::constant(1.0), PolyC::constant(1.0)};
      RationalForm base = n < 0 ? RationalForm{b->den, b->num} : *b;
      if (n < 0 && base.den.is_zero()) return std::nullopt;
      for (long k = 0; k < std::labs(n); ++k) {
        acc = {acc.num * base.num, acc.den * base.den};
        if (acc.num.degree() > max_degree || acc.den.degree() > max_degree)
          return std::nullopt;
      }
      return acc;
    }
    case Expr::Kind::Exp:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<PolyC> to_polynomial(const Expr& e, int max_degree) {
  auto f = rational_of(e, max_degree);
  if (!f) return std::nullopt;
  if (f->den.degree() == 0) return f->num * (1.0 / f->den.lead());
  auto [quo, rem] = f->num.divrem(f->den);
  if (rem.max_abs_coeff() <= 1e-12 * std::max(1.0, f->num.max_abs_coeff())) return quo;
  return std::nullopt;
}

std::optional<std::pair<PolyC, PolyC>> to_rational(const Expr& e, int max_degree) {
  auto f = rational_of(e, max_degree);
  if (!f) return std::nullopt;
  // Cancel common factors via exact-division probing against shared roots.
  if (f->den.degree() == 0)
    return std::make_pair(f->num * (1.0 / f->den.lead()), PolyC::constant(1.0));
  auto [quo, rem] = f->num.divrem(f->den);
  if (rem.max_abs_coeff() <= 1e-12 * std::max(1.0, f->num.max_abs_coeff()))
    return std::make_pair(quo, PolyC::constant(1.0));
  // Normalize the denominator to be monic.
  Complex lead = f->den.lead();
  return std::make_pair(f->num * (1.0 / lead), f->den * (1.0 / lead));
}

}  // namespace bryant4
