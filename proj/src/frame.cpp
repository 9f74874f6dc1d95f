#include "bryant4/frame.hpp"

#include <cmath>

#include "bryant4/errors.hpp"

namespace bryant4 {

Mat2 psi_z_form(const WeierstrassData& data, Complex f_at_z, const Mat2& F_at_z, Complex z,
                double pole_eps) {
  Complex g = data.g->eval(z, pole_eps);
  Complex w = data.w->eval(z, pole_eps);
  double eps = double(data.eps);
  Mat2 inner{eps * g * std::conj(f_at_z) * w, (1.0 - eps * std::norm(g)) * w, 0.0, 0.0};
  return F_at_z * inner * F_at_z.adjoint();
}

namespace {

struct EdgeState {
  Complex f;
  Mat2 F;
  Mat2 psi;  // Hermitian throughout: the derivative is M + M* at every stage
};

struct EdgeDeriv {
  Complex f;
  Mat2 F;
  Mat2 psi;
};

class EdgeIntegrator {
 public:
  EdgeIntegrator(const WeierstrassData& data, const Connection& conn, double pole_eps)
      : data_(data), conn_(conn), pole_eps_(pole_eps) {}

  EdgeDeriv deriv(Complex z, const EdgeState& s, Complex dz) const {
    EdgeDeriv d;
    d.f = data_.df_density(z, pole_eps_) * data_.w->eval(z, pole_eps_) * dz;
    d.F = s.F * conn_.matrix(z, s.f) * dz;
    Complex g = data_.g->eval(z, pole_eps_);
    Complex w = data_.w->eval(z, pole_eps_);
    double eps = double(data_.eps);
    Mat2 inner{eps * g * std::conj(s.f) * w, (1.0 - eps * std::norm(g)) * w, 0.0, 0.0};
    Mat2 m = (s.F * inner * s.F.adjoint()) * dz;
    d.psi = m + m.adjoint();
    return d;
  }

  // One classical 4th-order step of size dz starting at z.
  EdgeState step(Complex z, EdgeState s, Complex dz) const {
    EdgeDeriv k1 = deriv(z, s, dz);
    EdgeDeriv k2 = deriv(z + 0.5 * dz, advance(s, k1, 0.5), dz);
    EdgeDeriv k3 = deriv(z + 0.5 * dz, advance(s, k2, 0.5), dz);
    EdgeDeriv k4 = deriv(z + dz, advance(s, k3, 1.0), dz);
    s.f += (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f) / 6.0;
    s.F = s.F + (k1.F + 2.0 * k2.F + 2.0 * k3.F + k4.F) * (1.0 / 6.0);
    s.psi = s.psi + (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi) * (1.0 / 6.0);
    return s;
  }

  EdgeState integrate(Complex za, Complex zb, EdgeState s, int substeps) const {
    Complex dz = (zb - za) / double(substeps);
    for (int k = 0; k < substeps; ++k) s = step(za + double(k) * dz, s, dz);
    return s;
  }

 private:
  static EdgeState advance(EdgeState s, const EdgeDeriv& k, double c) {
    s.f += c * k.f;
    s.F = s.F + k.F * c;
    s.psi = s.psi + k.psi * c;
    return s;
  }

  const WeierstrassData& data_;
  const Connection& conn_;
  double pole_eps_;
};

int substeps_for_edge(const Connection& conn, Complex za, Complex zb, Complex f, int minimum) {
  // Step control: keep ||A|| * h_sub <= 0.1 for one-step stability.
  double norm_a = 0;
  for (Complex z : {za, 0.5 * (za + zb), zb}) {
    try {
      norm_a = std::max(norm_a, conn.matrix(z, f).max_abs());
    } catch (const Error&) {
      // Singular probe point right on a mask edge; the magnitude at the
      // other probes governs.
    }
  }
  double h = std::abs(zb - za);
  int need = int(std::ceil(norm_a * h / 0.1));
  return std::max(minimum, std::min(need, 1024));
}

}  // namespace

FrameField integrate_frame(const WeierstrassData& data, const DerivedData& derived,
                           const FrameOptions& opts, const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  SpanningTree tree = SpanningTree::build(grid, opts.sweep);
  Connection conn(data, tol.pole_eps);
  EdgeIntegrator integrator(data, conn, tol.pole_eps);

  FrameField out;
  out.F = GridField<Mat2>(grid.nx, grid.ny,
                          Mat2{Complex(quiet_nan(), 0), Complex(quiet_nan(), 0),
                               Complex(quiet_nan(), 0), Complex(quiet_nan(), 0)});
  out.psi = GridField<HermPoint>(grid.nx, grid.ny,
                                 HermPoint(quiet_nan(), Complex(quiet_nan(), 0), quiet_nan()));
  out.Omega = out.psi;

  // Pass 1: frame transfer matrices per lattice edge (dT = T A dz, T(a) = Id),
  // then F along the tree; loops multiply edge transfers around each cell.
  EdgeSet edges = EdgeSet::of(grid);
  GridField<Mat2> hT(grid.nx - 1, grid.ny), vT(grid.nx, grid.ny - 1);
  auto transfer = [&](Complex za, Complex zb, Complex fa) {
    int n = substeps_for_edge(conn, za, zb, fa, opts.min_substeps);
    EdgeState s{fa, Mat2::identity(), Mat2::zero()};
    return integrator.integrate(za, zb, s, n).F;
  };
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i + 1 < grid.nx; ++i)
      if (edges.horizontal.at(i, j))
        hT.at(i, j) = transfer(grid.node(i, j), grid.node(i + 1, j), derived.f.at(i, j));
  for (int j = 0; j + 1 < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (edges.vertical.at(i, j))
        vT.at(i, j) = transfer(grid.node(i, j), grid.node(i, j + 1), derived.f.at(i, j));

  out.F.at(grid.i0, grid.j0) = opts.F0;
  for (const auto& s : tree.order) {
    const Mat2& parent = out.F.at(s.pi, s.pj);
    Mat2 value;
    if (s.j == s.pj) {
      value = s.i > s.pi ? parent * hT.at(s.pi, s.pj) : parent * hT.at(s.i, s.j).inverse();
    } else {
      value = s.j > s.pj ? parent * vT.at(s.pi, s.pj) : parent * vT.at(s.i, s.j).inverse();
    }
    out.F.at(s.i, s.j) = value;
  }

  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (grid.open(i, j))
        out.det_drift_max =
            std::max(out.det_drift_max, std::abs(out.F.at(i, j).det() - 1.0));
  if (out.det_drift_max > tol.tol_det)
    throw numeric_error("DetDrift", "max |det F - 1| = " + std::to_string(out.det_drift_max));

  if (opts.check_loops) {
    for (int j = 0; j + 1 < grid.ny; ++j) {
      for (int i = 0; i + 1 < grid.nx; ++i) {
        if (!(grid.open(i, j) && grid.open(i + 1, j) && grid.open(i, j + 1) &&
              grid.open(i + 1, j + 1)))
          continue;
        Mat2 loop = hT.at(i, j) * vT.at(i + 1, j) * hT.at(i, j + 1).inverse() *
                    vT.at(i, j).inverse();
        out.loop_F_max =
            std::max(out.loop_F_max, (loop - Mat2::identity()).max_abs());
      }
    }
    double fscale = std::max(1.0, std::abs(grid.h()));
    if (out.loop_F_max > tol.tol_loop * 1e2 * fscale)
      throw numeric_error("LoopClosureFailure",
                          "frame loop residual " + std::to_string(out.loop_F_max));
  }

  // Pass 2: psi increments per edge using the true frame at the edge start.
  GridField<Mat2> hPsi(grid.nx - 1, grid.ny), vPsi(grid.nx, grid.ny - 1);
  auto psi_increment = [&](int i, int j, Complex za, Complex zb) {
    int n = substeps_for_edge(conn, za, zb, derived.f.at(i, j), opts.min_substeps);
    EdgeState s{derived.f.at(i, j), out.F.at(i, j), Mat2::zero()};
    return integrator.integrate(za, zb, s, n).psi;
  };
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i + 1 < grid.nx; ++i)
      if (edges.horizontal.at(i, j))
        hPsi.at(i, j) = psi_increment(i, j, grid.node(i, j), grid.node(i + 1, j));
  for (int j = 0; j + 1 < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (edges.vertical.at(i, j))
        vPsi.at(i, j) = psi_increment(i, j, grid.node(i, j), grid.node(i, j + 1));

  GridField<Mat2> psi_mat(grid.nx, grid.ny);
  psi_mat.at(grid.i0, grid.j0) = opts.psi0.mat();
  for (const auto& s : tree.order) {
    const Mat2& parent = psi_mat.at(s.pi, s.pj);
    Mat2 value;
    if (s.j == s.pj) {
      value = s.i > s.pi ? parent + hPsi.at(s.pi, s.pj) : parent - hPsi.at(s.i, s.j);
    } else {
      value = s.j > s.pj ? parent + vPsi.at(s.pi, s.pj) : parent - vPsi.at(s.i, s.j);
    }
    psi_mat.at(s.i, s.j) = value;
  }
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (grid.open(i, j)) out.psi.at(i, j) = HermPoint::from_mat(psi_mat.at(i, j));

  if (opts.check_loops) {
    double perimeter = 2.0 * (grid.hx() + grid.hy());
    for (int j = 0; j + 1 < grid.ny; ++j) {
      for (int i = 0; i + 1 < grid.nx; ++i) {
        if (!(grid.open(i, j) && grid.open(i + 1, j) && grid.open(i, j + 1) &&
              grid.open(i + 1, j + 1)))
          continue;
        // The increments around a cell must cancel; non-closure signals
        // failure of the mixed-partials (integrability) condition.
        Mat2 loop = hPsi.at(i, j) + vPsi.at(i + 1, j) - hPsi.at(i, j + 1) - vPsi.at(i, j);
        double scale = std::max(1.0, perimeter * psi_mat.at(i, j).max_abs());
        out.loop_psi_max = std::max(out.loop_psi_max, loop.max_abs() / scale);
      }
    }
    if (out.loop_psi_max > tol.tol_loop * 1e2)
      throw numeric_error("LoopClosureFailure",
                          "psi loop residual " + std::to_string(out.loop_psi_max) +
                              "; mixed-partials consistency fails");
  }

  // Omega = F^{-1} psi (F^{-1})^*.
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      Mat2 finv = out.F.at(i, j).inverse();
      out.Omega.at(i, j) = HermPoint::from_mat(finv * out.psi.at(i, j).mat() * finv.adjoint());
    }
  }
  return out;
}

SecondOrderReport second_order_check(const WeierstrassData& data, const DerivedData& derived,
                                     const FrameField& frame, const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  ExprPtr gp = data.g->derivative();
  ExprPtr gpp = gp->derivative();
  double eps = double(data.eps);

  GridField<Complex> C(grid.nx, grid.ny), D(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      C.at(i, j) = frame.F.at(i, j).a;
      D.at(i, j) = frame.F.at(i, j).c;
    }

  SecondOrderReport report;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      auto c1 = fd_dz6(grid, C, i, j);
      auto c2 = fd_dzz6(grid, C, i, j);
      auto d1 = fd_dz6(grid, D, i, j);
      auto d2 = fd_dzz6(grid, D, i, j);
      if (!c1 || !c2 || !d1 || !d2) continue;
      Complex z = grid.node(i, j);
      Complex f = derived.f.at(i, j);
      Complex fp = data.df_density(z, tol.pole_eps) * data.w->eval(z, tol.pole_eps);
      Complex gpz = gp->eval(z, tol.pole_eps);
      if (std::abs(gpz) < 1e3 * tol.pole_eps) continue;
      Complex L = gpp->eval(z, tol.pole_eps) / gpz - fp / f;
      Complex coeff = (data.a + eps * std::conj(data.c) * data.g->eval(z, tol.pole_eps)) *
                      derived.q.at(i, j);
      Complex rc = *c2 - L * *c1 - coeff * C.at(i, j);
      Complex rd = *d2 - L * *d1 - coeff * D.at(i, j);
      double scale = 1.0 + std::abs(*c2) + std::abs(*d2) + std::abs(L * *c1) +
                     std::abs(L * *d1) + std::abs(coeff) * (std::abs(C.at(i, j))
                     + std::abs(D.at(i, j)));
      report.max_ode_residual =
          std::max(report.max_ode_residual, std::max(std::abs(rc), std::abs(rd)) / scale);
      Complex wr = C.at(i, j) * *d1 - D.at(i, j) * *c1 - gpz / f;
      report.max_wronskian_residual = std::max(report.max_wronskian_residual, std::abs(wr));
      ++report.nodes_checked;
    }
  }
  return report;
}

DifequationReport difequation_residual(const WeierstrassData& data, const DerivedData& derived,
                                       const FrameField& frame, const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  Connection conn(data, tol.pole_eps);
  // Omega is not holomorphic: d/dz = (d/dx - i d/dy)/2 entrywise.
  GridField<Complex> o11(grid.nx, grid.ny), o12(grid.nx, grid.ny), o21(grid.nx, grid.ny),
      o22(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      Mat2 m = frame.Omega.at(i, j).mat();
      o11.at(i, j) = m.a;
      o12.at(i, j) = m.b;
      o21.at(i, j) = m.c;
      o22.at(i, j) = m.d;
    }
  auto dz_of = [&](const GridField<Complex>& f, int i, int j) -> std::optional<Complex> {
    auto dx = fd_dx(grid, f, i, j);
    auto dy = fd_dy(grid, f, i, j);
    if (!dx || !dy) return std::nullopt;
    return 0.5 * (*dx - Complex(0, 1) * *dy);
  };

  DifequationReport report;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      auto d11 = dz_of(o11, i, j), d12 = dz_of(o12, i, j), d21 = dz_of(o21, i, j),
           d22 = dz_of(o22, i, j);
      if (!d11 || !d12 || !d21 || !d22) continue;
      Complex z = grid.node(i, j);
      Complex f = derived.f.at(i, j);
      Mat2 A = conn.matrix(z, f);
      Mat2 Omega_z{*d11, *d12, *d21, *d22};
      Complex g = data.g->eval(z, tol.pole_eps);
      Complex w = data.w->eval(z, tol.pole_eps);
      double eps = double(data.eps);
      Mat2 rhs{eps * g * std::conj(f) * w, (1.0 - eps * std::norm(g)) * w, 0.0, 0.0};
      Mat2 res = Omega_z + A * frame.Omega.at(i, j).mat() - rhs;
      double scale = std::max(1.0, rhs.max_abs() + (A * frame.Omega.at(i, j).mat()).max_abs());
      report.max_residual = std::max(report.max_residual, res.max_abs() / scale);
      ++report.nodes_checked;
    }
  }
  return report;
}

MixedPartialsReport mixed_partials_residual(const WeierstrassData& data,
                                            const DerivedData& derived, const FrameField& frame,
                                            const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  GridField<Complex> p11(grid.nx, grid.ny), p12(grid.nx, grid.ny), p21(grid.nx, grid.ny),
      p22(grid.nx, grid.ny);
  double phi_scale = 1.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      Mat2 phi = psi_z_form(data, derived.f.at(i, j), frame.F.at(i, j), grid.node(i, j),
                            tol.pole_eps);
      p11.at(i, j) = phi.a;
      p12.at(i, j) = phi.b;
      p21.at(i, j) = phi.c;
      p22.at(i, j) = phi.d;
      phi_scale = std::max(phi_scale, phi.max_abs());
    }
  // Since d/dz (phi*) = (d/dzbar phi)*, the consistency condition
  // phi_zbar = (phi*)_z says exactly that phi_zbar is Hermitian.
  auto dzbar_defect = [&](int i, int j) -> std::optional<Mat2> {
    auto take = [&](const GridField<Complex>& f) -> std::optional<Complex> {
      auto dx = fd_dx(grid, f, i, j);
      auto dy = fd_dy(grid, f, i, j);
      if (!dx || !dy) return std::nullopt;
      return 0.5 * (*dx + Complex(0, 1) * *dy);
    };
    auto a = take(p11), b = take(p12), c = take(p21), d = take(p22);
    if (!a || !b || !c || !d) return std::nullopt;
    Mat2 phi_zbar{*a, *b, *c, *d};
    return phi_zbar - phi_zbar.adjoint();
  };
  MixedPartialsReport report;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      auto res = dzbar_defect(i, j);
      if (!res) continue;
      report.max_residual = std::max(report.max_residual, res->max_abs() / phi_scale);
      ++report.nodes_checked;
    }
  }
  return report;
}

}  // namespace bryant4
