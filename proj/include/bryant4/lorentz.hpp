#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "bryant4/errors.hpp"

namespace bryant4 {

using Complex = std::complex<double>;

// 2x2 complex matrix [[a, b], [c, d]], value type.
struct Mat2 {
  Complex a{}, b{}, c{}, d{};

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 zero() { return {}; }

  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 operator*(Complex s) const { return {a * s, b * s, c * s, d * s}; }
  Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }

  Mat2 adjoint() const {
    return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
  }
  Complex det() const { return a * d - b * c; }
  Mat2 inverse() const {
    Complex dt = det();
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)),
                    std::max(std::abs(c), std::abs(d)));
  }
  double frobenius_sq() const {
    return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
  }
};

inline Mat2 operator*(Complex s, const Mat2& m) { return m * s; }
inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

// Vector of L^4 in canonical coordinates, metric -dx0^2+dx1^2+dx2^2+dx3^2.
struct SpacetimeVec {
  double x0 = 0, x1 = 0, x2 = 0, x3 = 0;

  SpacetimeVec operator+(const SpacetimeVec& o) const {
    return {x0 + o.x0, x1 + o.x1, x2 + o.x2, x3 + o.x3};
  }
  SpacetimeVec operator-(const SpacetimeVec& o) const {
    return {x0 - o.x0, x1 - o.x1, x2 - o.x2, x3 - o.x3};
  }
  SpacetimeVec operator*(double s) const { return {x0 * s, x1 * s, x2 * s, x3 * s}; }
  double euclid_norm_sq() const { return x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3; }
  double max_abs() const {
    return std::max(std::max(std::abs(x0), std::abs(x1)),
                    std::max(std::abs(x2), std::abs(x3)));
  }
};

// Point of L^4 as a 2x2 Hermitian matrix. The Hermitian constraint holds
// bit-exactly by construction: the diagonal is stored real, h21 is derived
// as conj(h12).
class HermPoint {
 public:
  HermPoint() = default;
  HermPoint(double h11, Complex h12, double h22) : h11_(h11), h22_(h22), h12_(h12) {}

  // Hermitizes an arbitrary matrix; the skew part is discarded.
  static HermPoint from_mat(const Mat2& m) {
    return HermPoint(m.a.real(), 0.5 * (m.b + std::conj(m.c)), m.d.real());
  }

  Complex h11() const { return {h11_, 0.0}; }
  Complex h12() const { return h12_; }
  Complex h21() const { return std::conj(h12_); }
  Complex h22() const { return {h22_, 0.0}; }

  Mat2 mat() const { return {h11(), h12(), h21(), h22()}; }

  double det() const { return h11_ * h22_ - std::norm(h12_); }
  double trace() const { return h11_ + h22_; }

  HermPoint operator+(const HermPoint& o) const {
    return HermPoint(h11_ + o.h11_, h12_ + o.h12_, h22_ + o.h22_);
  }
  HermPoint operator-(const HermPoint& o) const {
    return HermPoint(h11_ - o.h11_, h12_ - o.h12_, h22_ - o.h22_);
  }
  HermPoint operator*(double s) const { return HermPoint(h11_ * s, h12_ * s, h22_ * s); }

  double max_abs() const {
    return std::max(std::max(std::abs(h11_), std::abs(h22_)), std::abs(h12_));
  }

 private:
  double h11_ = 0, h22_ = 0;
  Complex h12_{};
};

// Element of SL(2,C); the determinant constraint is checked at construction.
class SL2C {
 public:
  explicit SL2C(const Mat2& m, double tol_det = 1e-9) : m_(m) {
    if (std::abs(m.det() - 1.0) > tol_det)
      throw validation_error("DetDrift", "matrix is not in SL(2,C) within tolerance");
  }
  const Mat2& mat() const { return m_; }

 private:
  Mat2 m_;
};

HermPoint to_herm(const SpacetimeVec& v);
SpacetimeVec from_herm(const HermPoint& m);

// Polarized determinant form of the Lorentzian product <m,m> = -det(m).
double minkowski_inner(const HermPoint& m, const HermPoint& n);
double minkowski_inner(const SpacetimeVec& u, const SpacetimeVec& v);

// Isometric action Phi . m = Phi m Phi*.
HermPoint sl2_act(const SL2C& phi, const HermPoint& m);

// Complexified 4-vector, used for z-derivatives of coordinate grids. The
// Lorentzian product extends C-bilinearly (no conjugation).
struct CVec4 {
  std::array<Complex, 4> v{};

  Complex& operator[](int k) { return v[static_cast<size_t>(k)]; }
  const Complex& operator[](int k) const { return v[static_cast<size_t>(k)]; }

  CVec4 operator+(const CVec4& o) const {
    CVec4 r;
    for (int k = 0; k < 4; ++k) r.v[k] = v[k] + o.v[k];
    return r;
  }
  CVec4 operator-(const CVec4& o) const {
    CVec4 r;
    for (int k = 0; k < 4; ++k) r.v[k] = v[k] - o.v[k];
    return r;
  }
  CVec4 operator*(Complex s) const {
    CVec4 r;
    for (int k = 0; k < 4; ++k) r.v[k] = v[k] * s;
    return r;
  }
  CVec4 conj() const {
    CVec4 r;
    for (int k = 0; k < 4; ++k) r.v[k] = std::conj(v[k]);
    return r;
  }
  double euclid_norm_sq() const {
    double s = 0;
    for (const auto& c : v) s += std::norm(c);
    return s;
  }
  static CVec4 from(const SpacetimeVec& u) {
    CVec4 r;
    r.v = {Complex(u.x0), Complex(u.x1), Complex(u.x2), Complex(u.x3)};
    return r;
  }
};

Complex minkowski_inner(const CVec4& u, const CVec4& w);

// Linear entry-to-coordinate map; agrees with from_herm on Hermitian input
// and extends it to arbitrary complex matrices.
CVec4 coords_of_mat(const Mat2& m);

}  // namespace bryant4
