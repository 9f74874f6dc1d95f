#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bryant4/analytic.hpp"
#include "bryant4/grid.hpp"
#include "bryant4/poly.hpp"
#include "bryant4/tolerances.hpp"

namespace bryant4 {

// Full input of the representation: meromorphic g, holomorphic 1-form
// w dz, curvature sign eps, structure constants a, b (real) and c
// (complex), the initial value f0 of f at the base point, and the grid.
struct WeierstrassData {
  ExprPtr g;
  ExprPtr w;
  int eps = -1;  // +1 or -1
  double a = 0, b = 0;
  Complex c{};
  Complex f0{1.0, 0.0};
  DomainGrid grid;
  int panels_per_edge = 4;

  Complex z0() const { return grid.base_point(); }

  // Density of df with respect to w dz: c + (a + eps b) g + eps conj(c) g^2.
  Complex df_density(Complex z, double pole_eps = 1e-12) const;
  // Upper connection entry density: (a + eps conj(c) g) w.
  Complex theta_density(Complex z, double pole_eps = 1e-12) const;
};

// f, the Hopf density q = w g'/f, and the structural flags derived from
// them. The grid may carry extra masked nodes (zeros of f).
struct DerivedData {
  GridField<Complex> f;
  std::optional<ExprPtr> f_expr;  // present when f is constant
  GridField<Complex> q;
  std::optional<ExprPtr> q_expr;
  bool parallel_h = false;
  bool flat = false;
  double q_max_abs = 0;
  DomainGrid grid;  // possibly more masked than the input grid
  std::vector<std::string> warnings;
};

struct C1Report {
  double min_margin = 0;  // min over unmasked nodes of 1 - eps |g|^2
  bool pole_matching_checked = false;
  std::vector<std::string> notes;
};

struct C2Report {
  double max_abs_q = 0;
  double max_loop_residual = 0;     // scaled cell loops of q
  double max_island_residual = 0;   // scaled contour around interior masked islands
  std::vector<std::string> notes;
};

// Positivity of 1 - eps|g|^2 on every unmasked node; when both g and w
// have rational form, each pole of g of order k must match a zero of w of
// order exactly 2k (roots searched over match_rect, defaulting to the grid
// rectangle). Throws C1Violation.
C1Report validate_C1(const WeierstrassData& data, const Tolerances& tol = {},
                     std::optional<Rect> match_rect = std::nullopt);

// Builds f = f0 + primitive of df over the spanning tree. Nodes where
// |f| < f_eps are masked (with a warning); the primitive's loop-closure
// residual is enforced. Also fills q, the flags, and the symbolic forms
// when f is constant.
DerivedData build_f(const WeierstrassData& data, const Tolerances& tol = {},
                    SpanningTree::Sweep sweep = SpanningTree::Sweep::RowMajor);

// Numeric holomorphy proxy for Q = w dg / f: boundedness of q plus loop
// closure of its contour integrals over cells and around interior masked
// islands. Throws C2Violation.
C2Report validate_C2(const WeierstrassData& data, const DerivedData& derived,
                     const Tolerances& tol = {});

// Mask disks around evaluation singularities of g, w, g' (poles hit while
// probing nodes). Returns the number of nodes masked.
int mask_singularities(WeierstrassData& data, const Tolerances& tol = {});

}  // namespace bryant4
