#include "bryant4/geometry.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "bryant4/errors.hpp"

namespace bryant4 {

namespace {

bool finite(const CVec4& v) {
  for (int k = 0; k < 4; ++k)
    if (!std::isfinite(v[k].real()) || !std::isfinite(v[k].imag())) return false;
  return true;
}

SpacetimeVec real_part(const CVec4& v) {
  return {v[0].real(), v[1].real(), v[2].real(), v[3].real()};
}

// Second-level finite differences (a derivative of an FD-derived field)
// need the inner stencils to have been centered throughout the outer
// window, otherwise the inner truncation error field is non-smooth and
// the outer derivative amplifies it by 1/h. This guard keeps such checks
// away from boundaries and masked nodes.
bool deep_interior(const DomainGrid& grid, int i, int j, int margin) {
  if (i < margin || j < margin || i + margin >= grid.nx || j + margin >= grid.ny) return false;
  for (int dj = -margin; dj <= margin; ++dj)
    for (int di = -margin; di <= margin; ++di)
      if (grid.masked(i + di, j + dj)) return false;
  return true;
}

constexpr int kSecondLevelMargin = 5;

}  // namespace

SurfaceDerivatives SurfaceDerivatives::compute(const DomainGrid& grid,
                                               const GridField<HermPoint>& psi) {
  const int nx = grid.nx, ny = grid.ny;
  std::array<GridField<double>, 4> coord;
  for (auto& c : coord) c = GridField<double>(nx, ny, quiet_nan());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!grid.open(i, j)) continue;
      SpacetimeVec v = from_herm(psi.at(i, j));
      coord[0].at(i, j) = v.x0;
      coord[1].at(i, j) = v.x1;
      coord[2].at(i, j) = v.x2;
      coord[3].at(i, j) = v.x3;
    }

  SurfaceDerivatives sd;
  sd.psi_z = GridField<CVec4>(nx, ny);
  sd.psi_zz = GridField<CVec4>(nx, ny);
  sd.psi_zzbar = GridField<SpacetimeVec>(nx, ny);
  sd.psi_x = GridField<SpacetimeVec>(nx, ny);
  sd.psi_y = GridField<SpacetimeVec>(nx, ny);
  sd.lambda_num = GridField<double>(nx, ny, quiet_nan());
  sd.valid = GridField<uint8_t>(nx, ny, 0);

  // Mixed derivative: y-derivative of the x-derivative grid.
  std::array<GridField<double>, 4> dx_grid;
  for (auto& g : dx_grid) g = GridField<double>(nx, ny, quiet_nan());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!grid.open(i, j)) continue;
      for (int k = 0; k < 4; ++k) {
        auto dx = fd_dx(grid, coord[k], i, j);
        if (dx) dx_grid[k].at(i, j) = *dx;
      }
    }

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!grid.open(i, j)) continue;
      bool ok = true;
      SpacetimeVec px{}, py{}, pxx{}, pyy{}, pxy{};
      CVec4 pz{};
      for (int k = 0; k < 4 && ok; ++k) {
        auto dx = fd_dx(grid, coord[k], i, j);
        auto dy = fd_dy(grid, coord[k], i, j);
        auto dxx = fd_dxx(grid, coord[k], i, j);
        auto dyy = fd_dyy(grid, coord[k], i, j);
        auto dxy = fd_dy(grid, dx_grid[k], i, j);
        if (!dx || !dy || !dxx || !dyy || !dxy || !std::isfinite(*dxy)) {
          ok = false;
          break;
        }
        auto set = [k](SpacetimeVec& v, double s) {
          switch (k) {
            case 0: v.x0 = s; break;
            case 1: v.x1 = s; break;
            case 2: v.x2 = s; break;
            default: v.x3 = s; break;
          }
        };
        set(px, *dx);
        set(py, *dy);
        set(pxx, *dxx);
        set(pyy, *dyy);
        set(pxy, *dxy);
        pz[k] = 0.5 * Complex(*dx, -*dy);
      }
      if (!ok) continue;
      sd.psi_x.at(i, j) = px;
      sd.psi_y.at(i, j) = py;
      sd.psi_z.at(i, j) = pz;
      // psi_zzbar = (psi_xx + psi_yy)/4, psi_zz = (psi_xx - psi_yy - 2i psi_xy)/4.
      sd.psi_zzbar.at(i, j) = (pxx + pyy) * 0.25;
      CVec4 cxx = CVec4::from(pxx), cyy = CVec4::from(pyy), cxy = CVec4::from(pxy);
      CVec4 pzz;
      for (int k = 0; k < 4; ++k) pzz[k] = 0.25 * (cxx[k] - cyy[k] - Complex(0, 2) * cxy[k]);
      sd.psi_zz.at(i, j) = pzz;
      sd.lambda_num.at(i, j) = 2.0 * minkowski_inner(pz, pz.conj()).real();
      sd.valid.at(i, j) = 1;
    }
  }
  return sd;
}

NormalFrame normal_frame(const WeierstrassData& data, const DerivedData& derived,
                         const FrameField& frame, const SurfaceDerivatives& sd,
                         const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  NormalFrame nf;
  nf.N = GridField<SpacetimeVec>(grid.nx, grid.ny);
  nf.M = GridField<SpacetimeVec>(grid.nx, grid.ny);
  nf.valid = GridField<uint8_t>(grid.nx, grid.ny, 0);

  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || !sd.valid.at(i, j)) continue;
      Complex g = data.g->eval(grid.node(i, j), tol.pole_eps);
      double rho = 2.0 / (1.0 - double(data.eps) * std::norm(g));
      const Mat2& F = frame.F.at(i, j);
      Mat2 col{F.a * std::conj(F.a), F.a * std::conj(F.c), F.c * std::conj(F.a),
               F.c * std::conj(F.c)};
      SpacetimeVec N = real_part(coords_of_mat(col * rho));

      // Orthogonal complement of the tangent plane under the Lorentzian
      // product: kernel of <v, psi_x> = <v, psi_y> = 0.
      const SpacetimeVec& t1 = sd.psi_x.at(i, j);
      const SpacetimeVec& t2 = sd.psi_y.at(i, j);
      Eigen::Matrix<double, 2, 4> sys;
      sys << -t1.x0, t1.x1, t1.x2, t1.x3, -t2.x0, t2.x1, t2.x2, t2.x3;
      Eigen::FullPivLU<Eigen::Matrix<double, 2, 4>> lu(sys);
      if (lu.dimensionOfKernel() != 2) continue;
      Eigen::Matrix<double, 4, Eigen::Dynamic> kern = lu.kernel();
      SpacetimeVec n1{kern(0, 0), kern(1, 0), kern(2, 0), kern(3, 0)};
      SpacetimeVec n2{kern(0, 1), kern(1, 1), kern(2, 1), kern(3, 1)};

      // Null directions of the Lorentzian normal plane span{n1, n2}.
      double q11 = minkowski_inner(n1, n1);
      double q12 = minkowski_inner(n1, n2);
      double q22 = minkowski_inner(n2, n2);
      SpacetimeVec cand[2];
      int ncand = 0;
      double magnitude = std::abs(q11) + 2.0 * std::abs(q12) + std::abs(q22);
      if (std::abs(q22) >= std::abs(q11)) {
        if (std::abs(q22) < 1e-14 * magnitude) {
          cand[ncand++] = n2;
          if (std::abs(q12) > 0) cand[ncand++] = n1 - n2 * (q11 / (2.0 * q12));
        } else {
          double disc = std::max(0.0, q12 * q12 - q11 * q22);
          double root = std::sqrt(disc);
          cand[ncand++] = n1 + n2 * ((-q12 + root) / q22);
          cand[ncand++] = n1 + n2 * ((-q12 - root) / q22);
        }
      } else {
        double disc = std::max(0.0, q12 * q12 - q11 * q22);
        double root = std::sqrt(disc);
        cand[ncand++] = n2 + n1 * ((-q12 + root) / q11);
        cand[ncand++] = n2 + n1 * ((-q12 - root) / q11);
      }

      // Keep the null direction transversal to N, scaled to <N, M> = 2.
      double best = 0;
      SpacetimeVec M{};
      bool found = false;
      for (int k = 0; k < ncand; ++k) {
        double pairing = minkowski_inner(cand[k], N);
        double scale = std::sqrt(cand[k].euclid_norm_sq() * N.euclid_norm_sq());
        if (scale <= 0) continue;
        if (std::abs(pairing) / scale > best) {
          best = std::abs(pairing) / scale;
          M = cand[k] * (2.0 / pairing);
          found = true;
        }
      }
      if (!found || best < 1e-8) continue;
      nf.N.at(i, j) = N;
      nf.M.at(i, j) = M;
      nf.valid.at(i, j) = 1;
    }
  }
  return nf;
}

MetricCheck induced_metric_check(const WeierstrassData& data, const DerivedData& derived,
                                 const SurfaceDerivatives& sd,
                                 const GridField<Complex>* q_independent,
                                 const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  ExprPtr gp = data.g->derivative();
  MetricCheck check;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || !sd.valid.at(i, j)) continue;
      Complex z = grid.node(i, j);
      Complex g = data.g->eval(z, tol.pole_eps);
      Complex w = data.w->eval(z, tol.pole_eps);
      double margin = 1.0 - double(data.eps) * std::norm(g);
      double lambda_formula = margin * margin * std::norm(w);
      double lambda = sd.lambda_num.at(i, j);
      if (!(lambda > 0)) continue;
      check.identity_rel_max =
          std::max(check.identity_rel_max, std::abs(lambda - lambda_formula) / lambda);
      Complex conf = minkowski_inner(sd.psi_z.at(i, j), sd.psi_z.at(i, j));
      check.conformality_ratio_max =
          std::max(check.conformality_ratio_max, std::abs(conf) / lambda);
      if (q_independent) {
        Complex gpz = gp->eval(z, tol.pole_eps);
        Complex qn = q_independent->at(i, j);
        if (std::abs(gpz) > 1e-6 && std::isfinite(qn.real())) {
          Complex fq = derived.f.at(i, j) * qn;
          double lambda_coef = std::norm(fq / gpz) * margin * margin;
          check.coefuno_rel_max =
              std::max(check.coefuno_rel_max, std::abs(lambda - lambda_coef) / lambda);
        }
      }
      ++check.nodes_checked;
    }
  }
  return check;
}

MeanCurvatureCheck mean_curvature_check(const WeierstrassData& data, const DerivedData& derived,
                                        const SurfaceDerivatives& sd, const NormalFrame& nf,
                                        const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  MeanCurvatureCheck check;
  check.H = GridField<SpacetimeVec>(grid.nx, grid.ny);
  check.isotropy_ratio = GridField<double>(grid.nx, grid.ny, quiet_nan());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || !sd.valid.at(i, j)) continue;
      double lambda = sd.lambda_num.at(i, j);
      if (!(lambda > 0)) continue;
      SpacetimeVec H = sd.psi_zzbar.at(i, j) * (2.0 / lambda);
      check.H.at(i, j) = H;
      double hh = minkowski_inner(H, H);
      double scale = std::max(H.euclid_norm_sq(), 1.0 / (lambda * lambda));
      double ratio = std::abs(hh) / scale;
      check.isotropy_ratio.at(i, j) = ratio;
      check.isotropy_ratio_max = std::max(check.isotropy_ratio_max, ratio);

      if (nf.valid.at(i, j)) {
        Complex z = grid.node(i, j);
        Complex g = data.g->eval(z, tol.pole_eps);
        double margin = 1.0 - double(data.eps) * std::norm(g);
        double formula = (data.a + data.b * std::norm(g) +
                          2.0 * double(data.eps) * (std::conj(data.c) * g).real()) /
                         margin;
        double measured = 0.5 * minkowski_inner(H, nf.M.at(i, j));
        check.eland_rel_max = std::max(
            check.eland_rel_max, std::abs(measured - formula) / (1.0 + std::abs(formula)));
        // E - E~ = <psi_zzbar, N>; it vanishes in the marginally trapped gauge.
        double e_defect = minkowski_inner(sd.psi_zzbar.at(i, j), nf.N.at(i, j));
        double e_val = 0.5 * minkowski_inner(sd.psi_zzbar.at(i, j), nf.M.at(i, j));
        check.e_match_rel_max =
            std::max(check.e_match_rel_max, std::abs(e_defect) / (1.0 + std::abs(e_val)));
      }
      ++check.nodes_checked;
    }
  }
  return check;
}

GaussCurvatureCheck gauss_curvature_check(const WeierstrassData& data,
                                          const DerivedData& derived,
                                          const SurfaceDerivatives& sd,
                                          const GridField<Complex>* q_independent,
                                          const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  ExprPtr gp = data.g->derivative();
  GaussCurvatureCheck check;
  check.K = GridField<double>(grid.nx, grid.ny, quiet_nan());

  GridField<double> log_lambda(grid.nx, grid.ny, quiet_nan());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (grid.open(i, j) && sd.valid.at(i, j) && sd.lambda_num.at(i, j) > 0)
        log_lambda.at(i, j) = std::log(sd.lambda_num.at(i, j));

  double K_abs_max = 0;
  std::vector<double> K_samples;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || !sd.valid.at(i, j)) continue;
      if (!deep_interior(grid, i, j, kSecondLevelMargin)) continue;
      auto dxx = fd_dxx(grid, log_lambda, i, j);
      auto dyy = fd_dyy(grid, log_lambda, i, j);
      if (!dxx || !dyy || !std::isfinite(*dxx) || !std::isfinite(*dyy)) continue;
      double lambda = sd.lambda_num.at(i, j);
      double K_num = -(2.0 / lambda) * 0.25 * (*dxx + *dyy);
      check.K.at(i, j) = K_num;

      Complex z = grid.node(i, j);
      Complex g = data.g->eval(z, tol.pole_eps);
      Complex gpz = gp->eval(z, tol.pole_eps);
      double margin = 1.0 - double(data.eps) * std::norm(g);
      double K_formula = 4.0 * double(data.eps) * std::norm(gpz) / (lambda * margin * margin);
      double scale = std::max(1.0, std::abs(K_formula));
      check.intrinsic_vs_formula_rel_max =
          std::max(check.intrinsic_vs_formula_rel_max, std::abs(K_num - K_formula) / scale);
      if (q_independent && std::isfinite(q_independent->at(i, j).real())) {
        Complex fq = derived.f.at(i, j) * q_independent->at(i, j);
        double K_fq = 4.0 * double(data.eps) * std::norm(fq) / (lambda * lambda);
        check.fq_vs_formula_rel_max =
            std::max(check.fq_vs_formula_rel_max, std::abs(K_fq - K_formula) / scale);
      }
      K_abs_max = std::max(K_abs_max, std::abs(K_formula));
      K_samples.push_back(K_num);
      ++check.nodes_checked;
    }
  }
  for (double k_num : K_samples) {
    if (std::abs(k_num) < 1e-3 * std::max(1e-12, K_abs_max)) continue;
    if (k_num * double(data.eps) < 0) check.sign_consistent = false;
  }
  return check;
}

GaussMapCheck hyperbolic_gauss_check(const WeierstrassData& data, const DerivedData& derived,
                                     const FrameField& frame, const NormalFrame& nf,
                                     const Tolerances& tol) {
  (void)data;
  (void)tol;
  const DomainGrid& grid = derived.grid;
  GaussMapCheck check;
  check.G = GridField<Complex>(grid.nx, grid.ny, Complex(quiet_nan(), quiet_nan()));
  check.at_infinity = GridField<uint8_t>(grid.nx, grid.ny, 0);

  std::array<GridField<Complex>, 4> Ncoord;
  for (auto& c : Ncoord) c = GridField<Complex>(grid.nx, grid.ny, Complex(quiet_nan(), 0));

  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      const Mat2& F = frame.F.at(i, j);
      double col_norm = std::sqrt(std::norm(F.a) + std::norm(F.c));
      if (std::abs(F.a) < 1e-8 * col_norm) {
        check.at_infinity.at(i, j) = 1;
        ++check.infinity_count;
      } else {
        check.G.at(i, j) = F.c / F.a;
      }
      if (nf.valid.at(i, j)) {
        const SpacetimeVec& N = nf.N.at(i, j);
        double nn = minkowski_inner(N, N);
        check.null_max =
            std::max(check.null_max, std::abs(nn) / std::max(1.0, N.euclid_norm_sq()));
        CVec4 c = CVec4::from(N);
        for (int k = 0; k < 4; ++k) Ncoord[k].at(i, j) = c[k];
      }
    }
  }

  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || !nf.valid.at(i, j)) continue;
      CVec4 Nz;
      bool ok = true;
      for (int k = 0; k < 4 && ok; ++k) {
        auto dx = fd_dx(grid, Ncoord[k], i, j);
        auto dy = fd_dy(grid, Ncoord[k], i, j);
        if (!dx || !dy) {
          ok = false;
          break;
        }
        Nz[k] = 0.5 * (*dx - Complex(0, 1) * *dy);
      }
      if (!ok || !finite(Nz)) continue;
      double norm_sq = Nz.euclid_norm_sq();
      if (norm_sq < 1e-16) continue;
      Complex nznz = minkowski_inner(Nz, Nz);
      check.conformality_ratio_max =
          std::max(check.conformality_ratio_max, std::abs(nznz) / norm_sq);
      ++check.nodes_checked;
    }
  }
  return check;
}

HopfCheck hopf_check(const WeierstrassData& data, const DerivedData& derived,
                     const SurfaceDerivatives& sd, const NormalFrame& nf,
                     const Tolerances& tol) {
  (void)data;
  (void)tol;
  const DomainGrid& grid = derived.grid;
  int sd_nodes = 0, nf_nodes = 0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      sd_nodes += sd.valid.at(i, j);
      nf_nodes += nf.valid.at(i, j);
    }
  if (sd_nodes > 0 && nf_nodes < sd_nodes / 2)
    throw numeric_error("FrameDegeneracy",
                        "normal frame extraction failed on most nodes (" +
                            std::to_string(nf_nodes) + " of " + std::to_string(sd_nodes) + ")");
  HopfCheck check;
  check.q_num = GridField<Complex>(grid.nx, grid.ny, Complex(quiet_nan(), quiet_nan()));
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || !sd.valid.at(i, j) || !nf.valid.at(i, j)) continue;
      // p~ - p = -<psi_zz, eta + eta~> in the parallel frame.
      Complex q_num = -minkowski_inner(sd.psi_zz.at(i, j), CVec4::from(nf.N.at(i, j)));
      check.q_num.at(i, j) = q_num;
      Complex q_data = derived.q.at(i, j);
      check.match_rel_max =
          std::max(check.match_rel_max, std::abs(q_num - q_data) / (1.0 + std::abs(q_data)));
      ++check.nodes_checked;
    }
  }
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || !deep_interior(grid, i, j, kSecondLevelMargin)) continue;
      auto dx = fd_dx(grid, check.q_num, i, j);
      auto dy = fd_dy(grid, check.q_num, i, j);
      if (!dx || !dy || !std::isfinite(dx->real()) || !std::isfinite(dy->real())) continue;
      Complex dbar = 0.5 * (*dx + Complex(0, 1) * *dy);
      check.dbar_max = std::max(check.dbar_max, std::abs(dbar) / (1.0 + derived.q_max_abs));
    }
  }
  return check;
}

namespace {

// {h, z} = h'''/h' - (3/2)(h''/h')^2 for a symbolic h.
Complex schwarzian_symbolic(const Expr& g, Complex z, double pole_eps) {
  ExprPtr d1 = g.derivative();
  ExprPtr d2 = d1->derivative();
  ExprPtr d3 = d2->derivative();
  Complex g1 = d1->eval(z, pole_eps);
  Complex g2 = d2->eval(z, pole_eps);
  Complex g3 = d3->eval(z, pole_eps);
  Complex ratio = g2 / g1;
  return g3 / g1 - 1.5 * ratio * ratio;
}

}  // namespace

SchwarzianCheck schwarzian_check(const WeierstrassData& data, const DerivedData& derived,
                                 const GaussMapCheck& gauss, const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  ExprPtr gp = data.g->derivative();
  ExprPtr gpp = gp->derivative();
  ExprPtr gppp = gpp->derivative();
  ExprPtr wp = data.w->derivative();
  double eps = double(data.eps);

  SchwarzianCheck check;
  // G is a Mobius image of g exactly when the off-diagonal 1-form
  // vanishes and f is constant.
  check.symbolic = (data.a == 0.0 && data.c == Complex{} && derived.parallel_h);

  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || gauss.at_infinity.at(i, j)) continue;
      Complex z = grid.node(i, j);
      Complex gpz = gp->eval(z, tol.pole_eps);
      if (std::abs(gpz) < 1e-8) continue;
      Complex f = derived.f.at(i, j);
      Complex w = data.w->eval(z, tol.pole_eps);
      Complex fp = data.df_density(z, tol.pole_eps) * w;
      Complex fpp = ((data.a + eps * data.b) +
                     2.0 * eps * std::conj(data.c) * data.g->eval(z, tol.pole_eps)) *
                        gpz * w +
                    data.df_density(z, tol.pole_eps) * wp->eval(z, tol.pole_eps);
      Complex g2 = gpp->eval(z, tol.pole_eps);
      Complex g3 = gppp->eval(z, tol.pole_eps);
      // L = (g'/f)'/(g'/f) = g''/g' - f'/f.
      Complex L = g2 / gpz - fp / f;
      Complex Lp = (g3 * gpz - g2 * g2) / (gpz * gpz) - (fpp * f - fp * fp) / (f * f);
      Complex coeff = data.a + eps * std::conj(data.c) * data.g->eval(z, tol.pole_eps);
      Complex rhs = Lp - 0.5 * L * L - 2.0 * coeff * derived.q.at(i, j);

      Complex lhs;
      if (check.symbolic) {
        lhs = schwarzian_symbolic(*data.g, z, tol.pole_eps);
      } else {
        auto g1d = fd_dz6(grid, gauss.G, i, j);
        auto g2d = fd_dzz6(grid, gauss.G, i, j);
        auto g3d = fd_dzzz6(grid, gauss.G, i, j);
        if (!g1d || !g2d || !g3d) continue;
        if (std::abs(*g1d) < 1e-10) continue;
        Complex ratio = *g2d / *g1d;
        lhs = *g3d / *g1d - 1.5 * ratio * ratio;
      }
      check.residual_ratio_max =
          std::max(check.residual_ratio_max, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
      ++check.nodes_checked;
    }
  }
  return check;
}

SmallFormulaCheck small_formula_check(const WeierstrassData& data, const DerivedData& derived,
                                      const FrameField& frame, const GaussMapCheck& gauss,
                                      const Tolerances& tol) {
  const DomainGrid& grid = derived.grid;
  ExprPtr gp = data.g->derivative();
  SmallFormulaCheck check;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j) || gauss.at_infinity.at(i, j)) continue;
      auto Gp = fd_dz6(grid, gauss.G, i, j);
      if (!Gp || std::abs(*Gp) < 1e-10) continue;
      Complex z = grid.node(i, j);
      Complex C = frame.F.at(i, j).a;
      Complex D = frame.F.at(i, j).c;
      Complex expected_sq = gp->eval(z, tol.pole_eps) / (derived.f.at(i, j) * *Gp);
      check.c_squared_rel_max = std::max(check.c_squared_rel_max,
                                         std::abs(C * C - expected_sq) / (1.0 + std::norm(C)));
      check.d_identity_max =
          std::max(check.d_identity_max,
                   std::abs(D - gauss.G.at(i, j) * C) / (1.0 + std::abs(D)));
      ++check.nodes_checked;
    }
  }
  return check;
}

ApenResult apen_decompose(const std::vector<Complex>& f1, const std::vector<Complex>& f2,
                          const std::vector<Complex>& f3, const std::vector<Complex>& f4,
                          double cond_limit, double reality_eps) {
  size_t n = f1.size();
  if (n < 8 || f2.size() != n || f3.size() != n || f4.size() != n)
    throw validation_error("DependentInputs", "need at least 8 aligned samples");

  double scale = 0;
  for (size_t k = 0; k < n; ++k)
    scale = std::max({scale, std::abs(f1[k]), std::abs(f2[k]), std::abs(f3[k]), std::abs(f4[k])});
  scale = std::max(scale, 1.0);
  for (size_t k = 0; k < n; ++k) {
    double im = (std::conj(f1[k]) * f2[k] + std::conj(f3[k]) * f4[k]).imag();
    if (std::abs(im) > reality_eps * scale * scale)
      throw validation_error(
          "RealityViolated",
          "f1 conj(f2) + f3 conj(f4) is not real at sample " + std::to_string(k));
  }

  // Unknowns [a, b, Re c, Im c]; each sample contributes four real rows.
  Eigen::MatrixXd A(4 * n, 4);
  Eigen::VectorXd rhs(4 * n);
  for (size_t k = 0; k < n; ++k) {
    double r1 = f1[k].real(), i1 = f1[k].imag();
    double r3 = f3[k].real(), i3 = f3[k].imag();
    Eigen::Index row = Eigen::Index(4 * k);
    A.row(row) << r1, 0, r3, -i3;
    rhs(row) = f2[k].real();
    A.row(row + 1) << i1, 0, i3, r3;
    rhs(row + 1) = f2[k].imag();
    A.row(row + 2) << 0, r3, r1, i1;
    rhs(row + 2) = f4[k].real();
    A.row(row + 3) << 0, i3, i1, -r1;
    rhs(row + 3) = f4[k].imag();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double cond = svd.singularValues()(0) / svd.singularValues()(3);
  if (!(cond < cond_limit))
    throw validation_error("DependentInputs",
                           "decomposition system condition " + std::to_string(cond));
  Eigen::Vector4d x = svd.solve(rhs);

  ApenResult result;
  result.a = x(0);
  result.b = x(1);
  result.c = {x(2), x(3)};
  for (size_t k = 0; k < n; ++k) {
    Complex r2 = f2[k] - (result.a * f1[k] + result.c * f3[k]);
    Complex r4 = f4[k] - (std::conj(result.c) * f1[k] + result.b * f3[k]);
    result.residual = std::max({result.residual, std::abs(r2), std::abs(r4)});
  }
  return result;
}

VerifiedSurface verify_surface(const WeierstrassData& data, const DerivedData& derived,
                               const FrameField& frame, const Tolerances& tol) {
  SurfaceDerivatives sd = SurfaceDerivatives::compute(derived.grid, frame.psi);
  NormalFrame nf = normal_frame(data, derived, frame, sd, tol);
  HopfCheck hopf = hopf_check(data, derived, sd, nf, tol);
  MetricCheck metric = induced_metric_check(data, derived, sd, &hopf.q_num, tol);
  MeanCurvatureCheck mean = mean_curvature_check(data, derived, sd, nf, tol);
  GaussCurvatureCheck kcheck = gauss_curvature_check(data, derived, sd, &hopf.q_num, tol);
  GaussMapCheck gauss = hyperbolic_gauss_check(data, derived, frame, nf, tol);
  SchwarzianCheck schwarz = schwarzian_check(data, derived, gauss, tol);
  SmallFormulaCheck small = small_formula_check(data, derived, frame, gauss, tol);
  SecondOrderReport ode = second_order_check(data, derived, frame, tol);
  DifequationReport dif = difequation_residual(data, derived, frame, tol);
  MixedPartialsReport mixed = mixed_partials_residual(data, derived, frame, tol);

  VerifiedSurface out;
  out.K = kcheck.K;
  out.hh_ratio = mean.isotropy_ratio;
  out.G = gauss.G;

  SurfaceReport& rep = out.report;
  rep.add("frame_det_drift_max", frame.det_drift_max, tol.tol_det);
  rep.add("frame_loop_residual_max", frame.loop_F_max, 1e2 * tol.tol_loop);
  rep.add("psi_loop_residual_max", frame.loop_psi_max, 1e2 * tol.tol_loop);
  rep.add("metric_identity_rel_max", metric.identity_rel_max, tol.tol_geo);
  rep.add("metric_conformality_ratio_max", metric.conformality_ratio_max, tol.tol_geo);
  rep.add("metric_coefuno_rel_max", metric.coefuno_rel_max, tol.tol_geo);
  rep.add("mean_curvature_isotropy_ratio_max", mean.isotropy_ratio_max, tol.tol_H);
  rep.add("mean_curvature_eland_rel_max", mean.eland_rel_max, tol.tol_geo);
  rep.add("second_fundamental_e_match_rel_max", mean.e_match_rel_max, tol.tol_geo);
  rep.add("gauss_curvature_intrinsic_rel_max", kcheck.intrinsic_vs_formula_rel_max, tol.tol_K);
  rep.add("gauss_curvature_fq_rel_max", kcheck.fq_vs_formula_rel_max, tol.tol_K);
  rep.add("gauss_map_null_max", gauss.null_max, 1e-12);
  rep.add("gauss_map_conformality_ratio_max", gauss.conformality_ratio_max, tol.tol_geo);
  rep.add("hopf_match_rel_max", hopf.match_rel_max, tol.tol_geo);
  rep.add("hopf_dbar_max", hopf.dbar_max, tol.tol_geo);
  rep.add("schwarzian_residual_ratio_max", schwarz.residual_ratio_max, tol.tol_schwarz);
  rep.add("small_formula_rel_max", small.c_squared_rel_max, tol.tol_geo);
  rep.add("small_formula_d_identity_max", small.d_identity_max, tol.tol_geo);
  rep.add("second_order_ode_residual_max", ode.max_ode_residual, tol.tol_ode);
  rep.add("wronskian_residual_max", ode.max_wronskian_residual, 1e-8);
  rep.add("difequation_residual_max", dif.max_residual, tol.tol_pde);
  rep.add("mixed_partials_residual_max", mixed.max_residual, tol.tol_pde);

  bool marginally_trapped = mean.isotropy_ratio_max <= tol.tol_H;
  bool flat_normal_proxy = hopf.dbar_max <= tol.tol_geo;
  rep.flag("marginally_trapped", marginally_trapped);
  rep.flag("flat_normal_bundle_proxy", flat_normal_proxy);
  rep.flag("bryant_type", marginally_trapped && flat_normal_proxy && !derived.flat);
  rep.flag("parallel_H", derived.parallel_h);
  rep.flag("flat", derived.flat);
  rep.flag("gauss_curvature_sign_consistent", kcheck.sign_consistent);
  return out;
}

}  // namespace bryant4
