#include "bryant4/weierstrass.hpp"

#include <cmath>

#include "bryant4/errors.hpp"

namespace bryant4 {

Complex WeierstrassData::df_density(Complex z, double pole_eps) const {
  Complex gz = g->eval(z, pole_eps);
  return c + (a + double(eps) * b) * gz + double(eps) * std::conj(c) * gz * gz;
}

Complex WeierstrassData::theta_density(Complex z, double pole_eps) const {
  return (a + double(eps) * std::conj(c) * g->eval(z, pole_eps)) * w->eval(z, pole_eps);
}

int mask_singularities(WeierstrassData& data, const Tolerances& tol) {
  ExprPtr gp = data.g->derivative();
  int masked = 0;
  double radius = tol.mask_radius_factor * data.grid.h();
  for (int j = 0; j < data.grid.ny; ++j) {
    for (int i = 0; i < data.grid.nx; ++i) {
      if (data.grid.masked(i, j)) continue;
      Complex z = data.grid.node(i, j);
      try {
        (void)data.g->eval(z, tol.pole_eps);
        (void)data.w->eval(z, tol.pole_eps);
        (void)gp->eval(z, tol.pole_eps);
      } catch (const Error&) {
        data.grid.mask_disk(z, radius);
        ++masked;
      }
    }
  }
  return masked;
}

C1Report validate_C1(const WeierstrassData& data, const Tolerances& tol,
                     std::optional<Rect> match_rect) {
  C1Report report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < data.grid.ny; ++j) {
    for (int i = 0; i < data.grid.nx; ++i) {
      if (data.grid.masked(i, j)) continue;
      Complex z = data.grid.node(i, j);
      double margin = 1.0 - double(data.eps) * std::norm(data.g->eval(z, tol.pole_eps));
      if (margin <= 0.0)
        throw validation_error("C1Violation",
                               "1 - eps|g|^2 = " + std::to_string(margin) + " at node z = (" +
                                   std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                                   ")");
      report.min_margin = std::min(report.min_margin, margin);
    }
  }

  // Pole/zero order matching when rational forms are recoverable.
  auto grat = to_rational(*data.g);
  auto wrat = to_rational(*data.w);
  if (grat && wrat && wrat->second.degree() == 0) {
    Rect rect = match_rect.value_or(
        Rect{data.grid.xmin, data.grid.xmax, data.grid.ymin, data.grid.ymax});
    PolyC wpoly = wrat->first * (1.0 / wrat->second.lead());
    if (grat->second.degree() >= 1) {
      auto g_orders = rational_orders(grat->first, grat->second, rect, tol.coprime_eps);
      std::vector<RootOrder> w_zeros;
      if (wpoly.degree() >= 1)
        w_zeros = rational_orders(wpoly, PolyC::constant(1.0), rect, tol.coprime_eps);
      for (const auto& ro : g_orders) {
        if (!ro.is_pole) continue;
        int matched = 0;
        for (const auto& wz : w_zeros)
          if (std::abs(wz.location - ro.location) < 1e-6 * (1.0 + std::abs(ro.location)))
            matched = wz.order;
        if (matched != 2 * ro.order)
          throw validation_error(
              "C1Violation", "pole of g of order " + std::to_string(ro.order) + " at (" +
                                 std::to_string(ro.location.real()) + ", " +
                                 std::to_string(ro.location.imag()) + ") needs a zero of w of order " +
                                 std::to_string(2 * ro.order) + ", found " +
                                 std::to_string(matched));
      }
      report.pole_matching_checked = true;
    }
  }
  return report;
}

DerivedData build_f(const WeierstrassData& data, const Tolerances& tol,
                    SpanningTree::Sweep sweep) {
  DerivedData out;
  out.grid = data.grid;

  const double eps_d = double(data.eps);
  double m = data.a + eps_d * data.b;
  bool df_zero = (data.c == Complex{} && m == 0.0);

  ExprPtr gp = data.g->derivative();
  auto integrand = [&](Complex z) {
    return data.df_density(z, tol.pole_eps) * data.w->eval(z, tol.pole_eps);
  };

  if (df_zero) {
    out.f = GridField<Complex>(data.grid.nx, data.grid.ny, data.f0);
    out.f_expr = Expr::constant(data.f0);
  } else {
    SpanningTree tree = SpanningTree::build(data.grid, sweep);
    PathPrimitiveResult prim =
        path_primitive(integrand, data.grid, tree, data.panels_per_edge, tol.tol_loop);
    out.f = GridField<Complex>(data.grid.nx, data.grid.ny, Complex(quiet_nan(), quiet_nan()));
    for (int j = 0; j < data.grid.ny; ++j)
      for (int i = 0; i < data.grid.nx; ++i)
        if (!data.grid.masked(i, j)) out.f.at(i, j) = data.f0 + prim.values.at(i, j);
  }

  // Zeros of f get masked rather than treated as fatal.
  double radius = tol.mask_radius_factor * data.grid.h();
  for (int j = 0; j < data.grid.ny; ++j) {
    for (int i = 0; i < data.grid.nx; ++i) {
      if (out.grid.masked(i, j)) continue;
      if (std::abs(out.f.at(i, j)) < tol.f_eps) {
        Complex z = data.grid.node(i, j);
        out.grid.mask_disk(z, radius);
        out.warnings.push_back("ZeroOfF: |f| < f_eps near z = (" + std::to_string(z.real()) +
                               ", " + std::to_string(z.imag()) + "); node masked");
      }
    }
  }

  // Parallel mean curvature corresponds to constant f.
  double fvar = 0;
  for (int j = 0; j < out.grid.ny; ++j)
    for (int i = 0; i < out.grid.nx; ++i)
      if (!out.grid.masked(i, j)) fvar = std::max(fvar, std::abs(out.f.at(i, j) - data.f0));
  out.parallel_h = fvar <= tol.f_const_eps * std::max(1.0, std::abs(data.f0));

  // Hopf density q = w g'/f.
  out.q = GridField<Complex>(data.grid.nx, data.grid.ny, Complex(quiet_nan(), quiet_nan()));
  for (int j = 0; j < out.grid.ny; ++j) {
    for (int i = 0; i < out.grid.nx; ++i) {
      if (out.grid.masked(i, j)) continue;
      Complex z = data.grid.node(i, j);
      Complex q = data.w->eval(z, tol.pole_eps) * gp->eval(z, tol.pole_eps) / out.f.at(i, j);
      out.q.at(i, j) = q;
      out.q_max_abs = std::max(out.q_max_abs, std::abs(q));
    }
  }
  if (out.parallel_h && out.f_expr)
    out.q_expr = Expr::div(Expr::mul(data.w, gp), *out.f_expr);
  out.flat = out.q_max_abs < tol.q_eps;
  return out;
}

namespace {

// RK4 edge integral of q = w g'/f jointly with f itself, so f is known
// along the edge at the same order as the quadrature.
struct QEdgeResult {
  Complex dq;  // integral of q dz over the edge
  double max_abs_q;
};

QEdgeResult q_edge_integral(const WeierstrassData& data, const ExprPtr& gp, Complex za,
                            Complex zb, Complex fa, int substeps, double pole_eps) {
  Complex dz = (zb - za) / double(substeps);
  Complex f = fa;
  Complex acc{};
  double max_q = 0;
  auto fdot = [&](Complex z) { return data.df_density(z, pole_eps) * data.w->eval(z, pole_eps); };
  auto qval = [&](Complex z, Complex fv) {
    return data.w->eval(z, pole_eps) * gp->eval(z, pole_eps) / fv;
  };
  for (int s = 0; s < substeps; ++s) {
    Complex z = za + double(s) * dz;
    Complex k1f = fdot(z) * dz, k1q = qval(z, f) * dz;
    Complex k2f = fdot(z + 0.5 * dz) * dz, k2q = qval(z + 0.5 * dz, f + 0.5 * k1f) * dz;
    Complex k3q = qval(z + 0.5 * dz, f + 0.5 * k2f) * dz;
    Complex k4f = fdot(z + dz) * dz, k4q = qval(z + dz, f + k2f) * dz;
    // Classical RK4 on state (f, Iq); f's own stages collapse because its
    // derivative does not depend on the state.
    Complex k3f = k2f;
    f += (k1f + 2.0 * k2f + 2.0 * k3f + k4f) / 6.0;
    acc += (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0;
    max_q = std::max(max_q, std::abs(qval(z, f)));
  }
  return {acc, max_q};
}

}  // namespace

C2Report validate_C2(const WeierstrassData& data, const DerivedData& derived,
                     const Tolerances& tol) {
  C2Report report;
  const DomainGrid& grid = derived.grid;
  ExprPtr gp = data.g->derivative();
  report.max_abs_q = derived.q_max_abs;

  EdgeSet edges = EdgeSet::of(grid);
  GridField<Complex> hint(grid.nx - 1, grid.ny, Complex{});
  GridField<Complex> vint(grid.nx, grid.ny - 1, Complex{});
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i + 1 < grid.nx; ++i)
      if (edges.horizontal.at(i, j))
        hint.at(i, j) = q_edge_integral(data, gp, grid.node(i, j), grid.node(i + 1, j),
                                        derived.f.at(i, j), data.panels_per_edge, tol.pole_eps)
                            .dq;
  for (int j = 0; j + 1 < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (edges.vertical.at(i, j))
        vint.at(i, j) = q_edge_integral(data, gp, grid.node(i, j), grid.node(i, j + 1),
                                        derived.f.at(i, j), data.panels_per_edge, tol.pole_eps)
                            .dq;

  double perimeter = 2.0 * (grid.hx() + grid.hy());
  double qscale = std::max(1.0, perimeter * derived.q_max_abs);
  for (int j = 0; j + 1 < grid.ny; ++j) {
    for (int i = 0; i + 1 < grid.nx; ++i) {
      if (!(grid.open(i, j) && grid.open(i + 1, j) && grid.open(i, j + 1) &&
            grid.open(i + 1, j + 1)))
        continue;
      Complex loop = hint.at(i, j) + vint.at(i + 1, j) - hint.at(i, j + 1) - vint.at(i, j);
      report.max_loop_residual =
          std::max(report.max_loop_residual, std::abs(loop) / qscale);
    }
  }
  if (report.max_loop_residual > tol.tol_loop)
    throw validation_error("C2Violation",
                           "w dg/f fails the holomorphy proxy: cell loop residual " +
                               std::to_string(report.max_loop_residual));

  // Contour around each interior masked island; a nonzero circulation
  // exposes a pole of q hidden inside the masked disk.
  std::vector<uint8_t> seen(grid.mask.size(), 0);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.masked(i, j) || seen[grid.index(i, j)]) continue;
      int lo_i = i, hi_i = i, lo_j = j, hi_j = j;
      bool touches_boundary = false;
      std::vector<std::pair<int, int>> stack{{i, j}};
      seen[grid.index(i, j)] = 1;
      while (!stack.empty()) {
        auto [ci, cj] = stack.back();
        stack.pop_back();
        lo_i = std::min(lo_i, ci);
        hi_i = std::max(hi_i, ci);
        lo_j = std::min(lo_j, cj);
        hi_j = std::max(hi_j, cj);
        if (ci == 0 || cj == 0 || ci == grid.nx - 1 || cj == grid.ny - 1)
          touches_boundary = true;
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int ni = ci + di[k], nj = cj + dj[k];
          if (grid.in_range(ni, nj) && grid.masked(ni, nj) && !seen[grid.index(ni, nj)]) {
            seen[grid.index(ni, nj)] = 1;
            stack.emplace_back(ni, nj);
          }
        }
      }
      if (touches_boundary) continue;
      int a_i = lo_i - 1, b_i = hi_i + 1, a_j = lo_j - 1, b_j = hi_j + 1;
      if (a_i < 0 || a_j < 0 || b_i >= grid.nx || b_j >= grid.ny) continue;
      Complex loop{};
      bool ok = true;
      for (int ii = a_i; ii < b_i && ok; ++ii)
        ok = edges.horizontal.at(ii, a_j) && edges.horizontal.at(ii, b_j);
      for (int jj = a_j; jj < b_j && ok; ++jj)
        ok = edges.vertical.at(a_i, jj) && edges.vertical.at(b_i, jj);
      if (!ok) continue;  // ring itself partially masked; covered by refusal later
      for (int ii = a_i; ii < b_i; ++ii) loop += hint.at(ii, a_j);
      for (int jj = a_j; jj < b_j; ++jj) loop += vint.at(b_i, jj);
      for (int ii = a_i; ii < b_i; ++ii) loop -= hint.at(ii, b_j);
      for (int jj = a_j; jj < b_j; ++jj) loop -= vint.at(a_i, jj);
      double scale = std::max(1.0, derived.q_max_abs);
      report.max_island_residual =
          std::max(report.max_island_residual, std::abs(loop) / scale);
    }
  }
  if (report.max_island_residual > 1e3 * tol.tol_loop)
    throw validation_error("C2Violation",
                           "w dg/f has a pole inside a masked region: circulation " +
                               std::to_string(report.max_island_residual));
  return report;
}

}  // namespace bryant4
