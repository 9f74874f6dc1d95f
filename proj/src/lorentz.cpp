#include "bryant4/lorentz.hpp"

namespace bryant4 {

HermPoint to_herm(const SpacetimeVec& v) {
  return HermPoint(v.x0 + v.x3, Complex(v.x1, v.x2), v.x0 - v.x3);
}

SpacetimeVec from_herm(const HermPoint& m) {
  double h11 = m.h11().real();
  double h22 = m.h22().real();
  return {0.5 * (h11 + h22), m.h12().real(), m.h12().imag(), 0.5 * (h11 - h22)};
}

double minkowski_inner(const HermPoint& m, const HermPoint& n) {
  return -0.5 * ((m + n).det() - m.det() - n.det());
}

double minkowski_inner(const SpacetimeVec& u, const SpacetimeVec& v) {
  return -u.x0 * v.x0 + u.x1 * v.x1 + u.x2 * v.x2 + u.x3 * v.x3;
}

HermPoint sl2_act(const SL2C& phi, const HermPoint& m) {
  Mat2 p = phi.mat() * m.mat() * phi.mat().adjoint();
  return HermPoint::from_mat(p);
}

Complex minkowski_inner(const CVec4& u, const CVec4& w) {
  return -u[0] * w[0] + u[1] * w[1] + u[2] * w[2] + u[3] * w[3];
}

CVec4 coords_of_mat(const Mat2& m) {
  const Complex half(0.5, 0.0);
  const Complex half_over_i(0.0, -0.5);  // 1/(2i)
  CVec4 r;
  r[0] = half * (m.a + m.d);
  r[1] = half * (m.b + m.c);
  r[2] = half_over_i * (m.b - m.c);
  r[3] = half * (m.a - m.d);
  return r;
}

}  // namespace bryant4
