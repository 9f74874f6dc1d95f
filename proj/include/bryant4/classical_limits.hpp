#pragma once

#include <vector>

#include "bryant4/frame.hpp"
#include "bryant4/weierstrass.hpp"

namespace bryant4 {

enum class LimitKind { MinimalR3, MaximalL3, CmcH3, CmcS3 };

struct LimitCase {
  LimitKind kind;
  double r = 1.0;  // used by the cmc kinds

  int eps() const {
    return (kind == LimitKind::MinimalR3 || kind == LimitKind::CmcH3) ? -1 : 1;
  }
  bool is_cmc() const { return kind == LimitKind::CmcH3 || kind == LimitKind::CmcS3; }
};

// Classical representation: four real path primitives of
//   ((1+eps) g, 1 + eps g^2, -i (1 - eps g^2), (eps-1) g) w dz
// assembled into a spacetime grid with base value zero. The x0 component
// is identically zero for eps = -1 and x3 for eps = +1 (exact zeros: the
// vanishing factor multiplies the integrand symbolically).
GridField<HermPoint> weierstrass_closed_form(const ExprPtr& g, const ExprPtr& w, int eps,
                                             const DomainGrid& grid, int panels_per_edge = 4,
                                             const Tolerances& tol = {});

struct BryantCurveResult {
  GridField<Mat2> B;       // null holomorphic curve, det B = 1
  GridField<HermPoint> psi;  // (1/r) B diag(1, -eps) B*
  FrameField frame;          // underlying frame integration
  double det_B_drift_max = 0;
  double null_ratio_max = 0;      // |det dB| / |dB|^2 by finite differences
  double hyperquadric_rel_max = 0;  // |-det psi - eps/r^2| * r^2
};

// Constant-mean-curvature recovery: integrates the frame for the data
// (a = r, b = -eps r, c = 0, f = 1) and forms the null curve
// B = F [[0, i], [i, -i g]].
BryantCurveResult bryant_null_curve(const ExprPtr& g, const ExprPtr& w, int eps, double r,
                                    const DomainGrid& grid, const Tolerances& tol = {});

struct DeformationFamily {
  std::vector<double> r_values;               // descending
  std::vector<GridField<HermPoint>> X;        // translated immersions per r
  GridField<HermPoint> X0;                    // extrapolated limit
  std::vector<double> sup_difference;         // sup |X_r - X0| per r
  double slope = 0;                           // log-log fit of sup difference vs r
  double limit_mean_curvature_max = 0;        // |H| of X0 by finite differences
  double oracle_residual = 0;                 // against the closed form, base-aligned
  double metric_r_variation_max = 0;          // metric independence across r
};

// Family X_r = (1/r)(F_r Delta F_r* - diag(-eps, 1)) for the Weierstrass
// data (g, w) with g(z0) = 0. X0 comes from Richardson extrapolation over
// the smallest r values (degree = points - 1 in r).
DeformationFamily deformation_family(const ExprPtr& g, const ExprPtr& w, int eps,
                                     std::vector<double> r_list, const DomainGrid& grid,
                                     int richardson_points = 4, const Tolerances& tol = {});

// c = 0 special family: f = f0 + (a + eps b) * primitive of g w. Verifies
// f stays away from zero (FVanishes otherwise) and returns the data ready
// for the general pipeline.
WeierstrassData c_zero_family(const ExprPtr& g, const ExprPtr& w, int eps, double a, double b,
                              Complex f0, const DomainGrid& grid, const Tolerances& tol = {});

// Max-norm difference after aligning the base values (the representation
// fixes surfaces only up to the base point).
double base_aligned_max_diff(const DomainGrid& grid, const GridField<HermPoint>& a,
                             const GridField<HermPoint>& b);

}  // namespace bryant4
