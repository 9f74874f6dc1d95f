#include "bryant4/classical_limits.hpp"

#include <cmath>

#include "bryant4/errors.hpp"
#include "bryant4/geometry.hpp"

namespace bryant4 {

GridField<HermPoint> weierstrass_closed_form(const ExprPtr& g, const ExprPtr& w, int eps,
                                             const DomainGrid& grid, int panels_per_edge,
                                             const Tolerances& tol) {
  SpanningTree tree = SpanningTree::build(grid, SpanningTree::Sweep::RowMajor);
  double e = double(eps);
  auto wf = [&](Complex z) { return w->eval(z, tol.pole_eps); };
  auto gf = [&](Complex z) { return g->eval(z, tol.pole_eps); };

  // The vanishing component multiplies an exact zero, never an integral.
  GridField<Complex> zero_grid(grid.nx, grid.ny, Complex{});
  auto p0 = (1.0 + e) == 0.0
                ? PathPrimitiveResult{zero_grid, 0.0}
                : path_primitive([&](Complex z) { return (1.0 + e) * gf(z) * wf(z); }, grid,
                                 tree, panels_per_edge, tol.tol_loop);
  auto p1 = path_primitive([&](Complex z) { return (1.0 + e * gf(z) * gf(z)) * wf(z); }, grid,
                           tree, panels_per_edge, tol.tol_loop);
  auto p2 = path_primitive(
      [&](Complex z) { return Complex(0, -1) * (1.0 - e * gf(z) * gf(z)) * wf(z); }, grid, tree,
      panels_per_edge, tol.tol_loop);
  auto p3 = (e - 1.0) == 0.0
                ? PathPrimitiveResult{zero_grid, 0.0}
                : path_primitive([&](Complex z) { return (e - 1.0) * gf(z) * wf(z); }, grid,
                                 tree, panels_per_edge, tol.tol_loop);

  GridField<HermPoint> out(grid.nx, grid.ny,
                           HermPoint(quiet_nan(), Complex(quiet_nan(), 0), quiet_nan()));
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      SpacetimeVec v{p0.values.at(i, j).real(), p1.values.at(i, j).real(),
                     p2.values.at(i, j).real(), p3.values.at(i, j).real()};
      out.at(i, j) = to_herm(v);
    }
  }
  return out;
}

namespace {

WeierstrassData cmc_data(const ExprPtr& g, const ExprPtr& w, int eps, double r,
                         const DomainGrid& grid) {
  WeierstrassData d;
  d.g = g;
  d.w = w;
  d.eps = eps;
  d.a = r;
  d.b = -double(eps) * r;  // keeps df = 0 so f is identically 1
  d.c = {0, 0};
  d.f0 = {1, 0};
  d.grid = grid;
  return d;
}

Mat2 cmc_delta(int eps, Complex g) {
  double e = double(eps);
  return {-e, e * std::conj(g), e * g, 1.0 - e * std::norm(g)};
}

}  // namespace

BryantCurveResult bryant_null_curve(const ExprPtr& g, const ExprPtr& w, int eps, double r,
                                    const DomainGrid& grid, const Tolerances& tol) {
  WeierstrassData data = cmc_data(g, w, eps, r, grid);
  DerivedData derived = build_f(data, tol);
  FrameOptions opts;
  Complex g0 = g->eval(grid.base_point(), tol.pole_eps);
  opts.psi0 = HermPoint::from_mat(cmc_delta(eps, g0) * (1.0 / r));
  FrameField frame = integrate_frame(data, derived, opts, tol);

  BryantCurveResult out;
  out.B = GridField<Mat2>(grid.nx, grid.ny);
  out.psi = GridField<HermPoint>(grid.nx, grid.ny,
                                 HermPoint(quiet_nan(), Complex(quiet_nan(), 0), quiet_nan()));
  double e = double(eps);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      Complex gz = g->eval(grid.node(i, j), tol.pole_eps);
      Mat2 join{0.0, Complex(0, 1), Complex(0, 1), Complex(0, -1) * gz};
      Mat2 B = frame.F.at(i, j) * join;
      out.B.at(i, j) = B;
      out.det_B_drift_max = std::max(out.det_B_drift_max, std::abs(B.det() - 1.0));
      Mat2 psi = B * Mat2{1.0, 0.0, 0.0, -e} * B.adjoint() * (1.0 / r);
      out.psi.at(i, j) = HermPoint::from_mat(psi);
      double det_psi = out.psi.at(i, j).det();
      out.hyperquadric_rel_max =
          std::max(out.hyperquadric_rel_max, std::abs(-det_psi - e / (r * r)) * r * r);
    }
  }

  // Nullity of the curve: det dB = 0 tested by finite differences.
  std::array<GridField<Complex>, 4> Bc;
  for (auto& c : Bc) c = GridField<Complex>(grid.nx, grid.ny, Complex(quiet_nan(), 0));
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (grid.open(i, j)) {
        Bc[0].at(i, j) = out.B.at(i, j).a;
        Bc[1].at(i, j) = out.B.at(i, j).b;
        Bc[2].at(i, j) = out.B.at(i, j).c;
        Bc[3].at(i, j) = out.B.at(i, j).d;
      }
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      auto da = fd_dz6(grid, Bc[0], i, j);
      auto db = fd_dz6(grid, Bc[1], i, j);
      auto dc = fd_dz6(grid, Bc[2], i, j);
      auto dd = fd_dz6(grid, Bc[3], i, j);
      if (!da || !db || !dc || !dd) continue;
      Mat2 dB{*da, *db, *dc, *dd};
      double norm_sq = dB.frobenius_sq();
      if (norm_sq < 1e-20) continue;
      out.null_ratio_max =
          std::max(out.null_ratio_max, std::abs(dB.det()) / norm_sq);
    }
  }
  out.frame = std::move(frame);
  return out;
}

DeformationFamily deformation_family(const ExprPtr& g, const ExprPtr& w, int eps,
                                     std::vector<double> r_list, const DomainGrid& grid,
                                     int richardson_points, const Tolerances& tol) {
  Complex g0 = g->eval(grid.base_point(), tol.pole_eps);
  if (std::abs(g0) > 1e-12)
    throw validation_error("GNotZeroAtBase",
                           "the deformation limit requires g(z0) = 0; got |g(z0)| = " +
                               std::to_string(std::abs(g0)));
  std::sort(r_list.begin(), r_list.end(), std::greater<double>());

  DeformationFamily fam;
  fam.r_values = r_list;
  double e = double(eps);
  Mat2 shift{-e, 0.0, 0.0, 1.0};

  for (double r : r_list) {
    WeierstrassData data = cmc_data(g, w, eps, r, grid);
    DerivedData derived = build_f(data, tol);
    FrameField frame = integrate_frame(data, derived, FrameOptions{}, tol);
    GridField<HermPoint> X(grid.nx, grid.ny,
                           HermPoint(quiet_nan(), Complex(quiet_nan(), 0), quiet_nan()));
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!grid.open(i, j)) continue;
        Complex gz = g->eval(grid.node(i, j), tol.pole_eps);
        const Mat2& F = frame.F.at(i, j);
        Mat2 m = (F * cmc_delta(eps, gz) * F.adjoint() - shift) * (1.0 / r);
        X.at(i, j) = HermPoint::from_mat(m);
      }
    fam.X.push_back(std::move(X));
  }

  // Richardson extrapolation at r = 0 over the smallest points: the
  // family is real analytic in r, so Lagrange weights at zero cancel the
  // leading orders.
  int npts = std::min<int>(richardson_points, int(r_list.size()));
  std::vector<double> rs(r_list.end() - npts, r_list.end());
  std::vector<double> weight(size_t(npts), 1.0);
  for (int a = 0; a < npts; ++a)
    for (int b = 0; b < npts; ++b)
      if (a != b) weight[size_t(a)] *= (0.0 - rs[size_t(b)]) / (rs[size_t(a)] - rs[size_t(b)]);

  fam.X0 = GridField<HermPoint>(grid.nx, grid.ny,
                                HermPoint(quiet_nan(), Complex(quiet_nan(), 0), quiet_nan()));
  size_t base_index = r_list.size() - size_t(npts);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      HermPoint acc;
      for (int k = 0; k < npts; ++k)
        acc = acc + fam.X[base_index + size_t(k)].at(i, j) * weight[size_t(k)];
      fam.X0.at(i, j) = acc;
    }

  // Log-log slope of the sup differences.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t t = 0; t < r_list.size(); ++t) {
    double sup = 0;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        if (grid.open(i, j))
          sup = std::max(sup, (fam.X[t].at(i, j) - fam.X0.at(i, j)).max_abs());
    fam.sup_difference.push_back(sup);
    double lx = std::log(r_list[t]), ly = std::log(sup);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double npts_d = double(r_list.size());
  fam.slope = (npts_d * sxy - sx * sy) / (npts_d * sxx - sx * sx);

  // The limit surface has vanishing mean curvature.
  SurfaceDerivatives sd = SurfaceDerivatives::compute(grid, fam.X0);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || !sd.valid.at(i, j)) continue;
      double lambda = sd.lambda_num.at(i, j);
      if (!(lambda > 0)) continue;
      SpacetimeVec H = sd.psi_zzbar.at(i, j) * (2.0 / lambda);
      fam.limit_mean_curvature_max =
          std::max(fam.limit_mean_curvature_max, std::sqrt(H.euclid_norm_sq()));
    }

  // Oracle comparison against the classical representation.
  GridField<HermPoint> oracle = weierstrass_closed_form(g, w, eps, grid, 4, tol);
  fam.oracle_residual = base_aligned_max_diff(grid, fam.X0, oracle);

  // Isometry across the family: the induced metric must not depend on r.
  std::vector<GridField<double>> lambdas;
  for (const auto& X : fam.X) {
    SurfaceDerivatives sdr = SurfaceDerivatives::compute(grid, X);
    lambdas.push_back(sdr.lambda_num);
  }
  for (size_t t = 1; t < lambdas.size(); ++t)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        double a = lambdas[0].at(i, j), b = lambdas[t].at(i, j);
        if (!std::isfinite(a) || !std::isfinite(b) || !(a > 0)) continue;
        fam.metric_r_variation_max =
            std::max(fam.metric_r_variation_max, std::abs(a - b) / a);
      }
  return fam;
}

WeierstrassData c_zero_family(const ExprPtr& g, const ExprPtr& w, int eps, double a, double b,
                              Complex f0, const DomainGrid& grid, const Tolerances& tol) {
  WeierstrassData data;
  data.g = g;
  data.w = w;
  data.eps = eps;
  data.a = a;
  data.b = b;
  data.c = {0, 0};
  data.f0 = f0;
  data.grid = grid;

  double m = a + double(eps) * b;
  if (m != 0.0) {
    SpanningTree tree = SpanningTree::build(grid, SpanningTree::Sweep::RowMajor);
    auto prim = path_primitive(
        [&](Complex z) { return g->eval(z, tol.pole_eps) * w->eval(z, tol.pole_eps); }, grid,
        tree, data.panels_per_edge, tol.tol_loop);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!grid.open(i, j)) continue;
        Complex f = f0 + m * prim.values.at(i, j);
        if (std::abs(f) <= tol.f_eps) {
          Complex z = grid.node(i, j);
          throw validation_error("FVanishes",
                                 "f vanishes near z = (" + std::to_string(z.real()) + ", " +
                                     std::to_string(z.imag()) + ")");
        }
      }
  }
  return data;
}

double base_aligned_max_diff(const DomainGrid& grid, const GridField<HermPoint>& a,
                             const GridField<HermPoint>& b) {
  HermPoint offset = a.at(grid.i0, grid.j0) - b.at(grid.i0, grid.j0);
  double m = 0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      m = std::max(m, (a.at(i, j) - b.at(i, j) - offset).max_abs());
    }
  return m;
}

}  // namespace bryant4
