#pragma once

#include <optional>

#include "bryant4/weierstrass.hpp"

namespace bryant4 {

// Traceless connection of the linear system F^{-1} dF = A dz with
//   A(z) = [[0, (a + eps conj(c) g) w], [g'/f, 0]].
// f rides along in the integration state so A is available at substep
// points to the same order as the one-step method.
struct Connection {
  const WeierstrassData* data;
  ExprPtr gp;
  double pole_eps;

  explicit Connection(const WeierstrassData& d, double eps = 1e-12)
      : data(&d), gp(d.g->derivative()), pole_eps(eps) {}

  Complex upper(Complex z) const { return data->theta_density(z, pole_eps); }
  Complex lower(Complex z, Complex f) const { return gp->eval(z, pole_eps) / f; }
  Mat2 matrix(Complex z, Complex f) const { return {0.0, upper(z), lower(z, f), 0.0}; }
};

// Grid-sampled frame F in SL(2,C), immersion psi, and the intermediate
// Hermitian matrix Omega = F^{-1} psi (F^{-1})*, plus integration
// diagnostics.
struct FrameField {
  GridField<Mat2> F;
  GridField<HermPoint> psi;
  GridField<HermPoint> Omega;
  double det_drift_max = 0;     // max |det F - 1|
  double loop_F_max = 0;        // scaled frame loop-closure residual
  double loop_psi_max = 0;      // scaled psi loop-closure residual
};

struct FrameOptions {
  Mat2 F0 = Mat2::identity();          // frame at the base node
  HermPoint psi0;                       // immersion at the base node
  SpanningTree::Sweep sweep = SpanningTree::Sweep::RowMajor;
  int min_substeps = 4;                 // per lattice edge
  bool check_loops = true;
};

// Integrates F (classical 4th-order one-step along spanning-tree edges),
// then psi from dpsi = phi dz + (phi dz)^*, and recovers Omega
// algebraically. Throws DetDrift / LoopClosureFailure.
FrameField integrate_frame(const WeierstrassData& data, const DerivedData& derived,
                           const FrameOptions& opts = {}, const Tolerances& tol = {});

// The 1-form coefficient phi with psi_z = phi:
//   phi = F [[eps g conj(f) w, (1 - eps|g|^2) w], [0, 0]] F*.
Mat2 psi_z_form(const WeierstrassData& data, Complex f_at_z, const Mat2& F_at_z, Complex z,
                double pole_eps = 1e-12);

struct SecondOrderReport {
  double max_ode_residual = 0;       // relative residual of the scalar ODE
  double max_wronskian_residual = 0; // |C D' - D C' - g'/f|
  int nodes_checked = 0;
};

// Checks that both entries of the first column of F solve
//   Z'' - ((g'/f)'/(g'/f)) Z' - (a + eps conj(c) g) q Z = 0
// with derivatives taken by high-order finite differences, and that the
// Wronskian relation C dD - D dC = dg/f holds.
SecondOrderReport second_order_check(const WeierstrassData& data, const DerivedData& derived,
                                     const FrameField& frame, const Tolerances& tol = {});

struct DifequationReport {
  double max_residual = 0;  // scaled residual of the Omega system
  int nodes_checked = 0;
};

// Finite-difference residual of the first-order system satisfied by Omega:
// the dz part of dOmega + A Omega + Omega A* equals
// [[eps g conj(f) w, (1-eps|g|^2) w], [0, 0]].
DifequationReport difequation_residual(const WeierstrassData& data, const DerivedData& derived,
                                       const FrameField& frame, const Tolerances& tol = {});

struct MixedPartialsReport {
  double max_residual = 0;
  int nodes_checked = 0;
};

// d/dzbar of phi minus d/dz of phi^*, by finite differences of the phi
// grid; vanishes exactly when the data is integrable.
MixedPartialsReport mixed_partials_residual(const WeierstrassData& data,
                                            const DerivedData& derived, const FrameField& frame,
                                            const Tolerances& tol = {});

}  // namespace bryant4
