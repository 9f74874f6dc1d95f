#pragma once

namespace bryant4 {

// Central tolerance set. Residual tolerances are quoted at grid spacing
// h = 1/64 on a unit-size domain; derivative-based checks scale like h^2
// under refinement.
struct Tolerances {
  double tol_det = 1e-9;      // |det F - 1| on every unmasked node
  double tol_inner = 1e-10;   // relative isometry defect of the SL(2,C) action
  double tol_loop = 1e-9;     // loop-closure residual per grid cell (scaled)
  double tol_pde = 1e-5;      // connection/compatibility PDE residuals
  double tol_ode = 1e-6;      // scalar second-order ODE residual
  double tol_geo = 1e-5;      // relative geometric identity residuals
  double tol_K = 1e-4;        // curvature expressions (double finite difference)
  double tol_H = 1e-5;        // isotropy of the mean curvature vector
  double tol_schwarz = 1e-5;  // Schwarzian identity, relative
  double tol_oracle = 1e-6;   // closed-form oracle equivalence
  double tol_null = 1e-8;     // null-curve determinant test

  double pole_eps = 1e-12;    // |denominator| floor during evaluation
  double f_eps = 1e-8;        // |f| below this is treated as a zero of f
  double q_eps = 1e-12;       // max|q| below this flags the flat case
  double f_const_eps = 1e-10; // relative variation of f for the parallel-H flag
  double coprime_eps = 1e-10; // normalized resultant floor
  double mask_radius_factor = 3.0;  // mask disk radius in units of h

  // Multiplies every residual tolerance (CLI --tol-scale). Evaluation
  // floors (pole_eps etc.) are left untouched.
  void scale(double s) {
    tol_det *= s;
    tol_inner *= s;
    tol_loop *= s;
    tol_pde *= s;
    tol_ode *= s;
    tol_geo *= s;
    tol_K *= s;
    tol_H *= s;
    tol_schwarz *= s;
    tol_oracle *= s;
    tol_null *= s;
  }
};

}  // namespace bryant4
