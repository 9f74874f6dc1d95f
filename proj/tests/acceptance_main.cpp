// Acceptance suite: runs every acceptance criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exit status is
// zero exactly when all criteria pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "bryant4/classical_limits.hpp"
#include "bryant4/classifier.hpp"
#include "bryant4/geometry.hpp"
#include "support/datasets.hpp"

using namespace bryant4;
using namespace bryant4::testdata;

namespace {

int failures = 0;

void line(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %2d  %-34s %s  %s\n", criterion, name.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

struct NamedRun {
  std::string name;
  WeierstrassData data;
  DerivedData derived;
  FrameField row, col;
};

NamedRun make_run(const std::string& name, WeierstrassData data, HermPoint psi0) {
  NamedRun run{name, std::move(data), {}, {}, {}};
  run.derived = build_f(run.data);
  FrameOptions opts;
  opts.psi0 = psi0;
  run.row = integrate_frame(run.data, run.derived, opts);
  opts.sweep = SpanningTree::Sweep::ColMajor;
  run.col = integrate_frame(run.data, run.derived, opts);
  return run;
}

double max_grid_diff(const DomainGrid& grid, const FrameField& a, const FrameField& b) {
  double m = 0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (grid.open(i, j)) {
        m = std::max(m, (a.F.at(i, j) - b.F.at(i, j)).max_abs());
        m = std::max(m, (a.psi.at(i, j) - b.psi.at(i, j)).max_abs());
      }
  return m;
}

}  // namespace

int main() {
  std::vector<NamedRun> runs;

  // ---- criterion 1: closed-form oracle equivalence --------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    for (int eps : {-1, 1}) {
      WeierstrassData d = enneper(eps, 65);
      GridField<HermPoint> oracle = weierstrass_closed_form(d.g, d.w, eps, d.grid);
      DerivedData derived = build_f(d);
      FrameField frame = integrate_frame(d, derived);
      worst = std::max(worst, base_aligned_max_diff(d.grid, frame.psi, oracle));
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    line(1, "weierstrass oracle equivalence", worst <= 1e-6 && seconds <= 10.0,
         "max_diff=" + fmt(worst) + " tol=1e-06 runtime=" + fmt(seconds) + "s");
  }

  // ---- shared pipeline runs for criteria 2, 3, 4 ----------------------
  runs.push_back(make_run("enneper_eps-1", enneper(-1, 65), {}));
  runs.push_back(make_run("enneper_eps+1", enneper(1, 65), {}));
  for (int eps : {-1, 1})
    for (double r : {0.5, 1.0, 2.0})
      runs.push_back(make_run("cmc_eps" + std::to_string(eps) + "_r" + std::to_string(r),
                              cmc(eps, r, 65), cmc_psi_base(eps, r, 0.0)));
  for (unsigned seed = 0; seed < 10; ++seed)
    runs.push_back(
        make_run("random_" + std::to_string(seed), random_admissible(1000u + seed, 65), {}));

  std::vector<SurfaceDerivatives> sds;
  sds.reserve(runs.size());
  for (const auto& run : runs)
    sds.push_back(SurfaceDerivatives::compute(run.derived.grid, run.row.psi));

  // ---- criterion 2: marginally trapped on randomized data -------------
  {
    double worst = 0;
    std::string worst_name;
    for (size_t t = 0; t < runs.size(); ++t) {
      if (runs[t].name.rfind("random_", 0) != 0) continue;
      NormalFrame nf = normal_frame(runs[t].data, runs[t].derived, runs[t].row, sds[t]);
      MeanCurvatureCheck check =
          mean_curvature_check(runs[t].data, runs[t].derived, sds[t], nf);
      if (check.isotropy_ratio_max > worst) {
        worst = check.isotropy_ratio_max;
        worst_name = runs[t].name;
      }
    }
    line(2, "marginally trapped (10 random sets)", worst <= 1e-5,
         "max |<H,H>| ratio=" + fmt(worst) + " tol=1e-05 worst=" + worst_name);
  }

  // ---- criterion 3: frame integrity across all test data --------------
  {
    double det_worst = 0, path_worst = 0;
    for (const auto& run : runs) {
      det_worst = std::max(det_worst, std::max(run.row.det_drift_max, run.col.det_drift_max));
      path_worst = std::max(path_worst, max_grid_diff(run.derived.grid, run.row, run.col));
    }
    line(3, "frame integrity (all test data)", det_worst <= 1e-9 && path_worst <= 1e-7,
         "det_drift=" + fmt(det_worst) + " path_indep=" + fmt(path_worst) +
             " tols 1e-09 / 1e-07");
  }

  // ---- criterion 4: metric identity across all test data --------------
  {
    double id_worst = 0, conf_worst = 0;
    for (size_t t = 0; t < runs.size(); ++t) {
      MetricCheck check = induced_metric_check(runs[t].data, runs[t].derived, sds[t]);
      id_worst = std::max(id_worst, check.identity_rel_max);
      conf_worst = std::max(conf_worst, check.conformality_ratio_max);
    }
    line(4, "metric identity (all test data)", id_worst <= 1e-5 && conf_worst <= 1e-5,
         "identity=" + fmt(id_worst) + " conformality=" + fmt(conf_worst) + " tol=1e-05");
  }

  // ---- criterion 5: cmc recovery --------------------------------------
  {
    double quad_worst = 0, null_worst = 0, omega_worst = 0;
    ExprPtr g = parse_expression("z");
    ExprPtr w = parse_expression("1");
    DomainGrid grid = DomainGrid::square(0.5, 65, {0, 0});
    for (int eps : {-1, 1}) {
      for (double r : {0.5, 1.0, 2.0}) {
        BryantCurveResult res = bryant_null_curve(g, w, eps, r, grid);
        quad_worst = std::max(quad_worst, res.hyperquadric_rel_max);
        null_worst = std::max(null_worst, res.null_ratio_max);
        double e = double(eps);
        for (int j = 0; j < grid.ny; ++j)
          for (int i = 0; i < grid.nx; ++i) {
            if (!grid.open(i, j)) continue;
            Complex gz = grid.node(i, j);
            HermPoint expected(-e / r, e * std::conj(gz) / r, (1.0 - e * std::norm(gz)) / r);
            omega_worst =
                std::max(omega_worst, (res.frame.Omega.at(i, j) - expected).max_abs());
          }
      }
    }
    line(5, "cmc recovery (r in {0.5,1,2})",
         quad_worst <= 1e-5 && null_worst <= 1e-8 && omega_worst <= 1e-6,
         "hyperquadric=" + fmt(quad_worst) + " null=" + fmt(null_worst) +
             " omega=" + fmt(omega_worst));
  }

  // ---- criterion 6: deformation ---------------------------------------
  {
    bool pass = true;
    std::string detail;
    ExprPtr g = parse_expression("z");
    ExprPtr w = parse_expression("1");
    DomainGrid grid = DomainGrid::square(0.5, 65, {0, 0});
    for (int eps : {-1, 1}) {
      DeformationFamily fam =
          deformation_family(g, w, eps, {0.4, 0.2, 0.1, 0.05, 0.025}, grid);
      bool ok = fam.slope >= 0.9 && fam.slope <= 1.1 && fam.limit_mean_curvature_max <= 1e-5 &&
                fam.oracle_residual <= 1e-5;
      pass = pass && ok;
      detail += (eps == -1 ? "eps-1: " : " eps+1: ") + std::string("slope=") + fmt(fam.slope) +
                " H0=" + fmt(fam.limit_mean_curvature_max) +
                " procrustes=" + fmt(fam.oracle_residual);
    }
    line(6, "deformation to the flat limit", pass, detail);
  }

  // ---- criterion 7: schwarzian identity --------------------------------
  {
    double bryant_worst = 0, minimal_worst = 0;
    for (const auto& run : runs) {
      bool is_cmc = run.name.rfind("cmc_", 0) == 0;
      bool is_minimal = run.name.rfind("enneper_", 0) == 0;
      if (!is_cmc && !is_minimal) continue;
      NormalFrame nf;  // gauss-map check needs only F and the flags
      nf.valid = GridField<uint8_t>(run.derived.grid.nx, run.derived.grid.ny, 0);
      GaussMapCheck gauss = hyperbolic_gauss_check(run.data, run.derived, run.row, nf);
      SchwarzianCheck check = schwarzian_check(run.data, run.derived, gauss);
      (is_cmc ? bryant_worst : minimal_worst) =
          std::max(is_cmc ? bryant_worst : minimal_worst, check.residual_ratio_max);
    }
    line(7, "schwarzian identity", bryant_worst <= 1e-5 && minimal_worst <= 1e-10,
         "bryant=" + fmt(bryant_worst) + " (tol 1e-05), minimal=" + fmt(minimal_worst) +
             " (tol 1e-10)");
  }

  // ---- criterion 8: classifier -----------------------------------------
  {
    RationalData rd;
    rd.P1 = PolyC({0.0, 1.0});
    rd.P2 = PolyC::constant(1.0);
    rd.Wpoly = PolyC::constant(1.0);
    rd.eps = -1;
    rd.a = 1.0;
    rd.b = 1.0;
    rd.c = {0, 0};

    bool ok = ftc_classify(rd).kind == FtcVerdictKind::Admissible;

    RationalData pc = rd;
    pc.c = {0.1, 0};
    FtcVerdict vc = ftc_classify(pc);
    ok = ok && vc.kind == FtcVerdictKind::Reject && vc.reason == "degree_obstruction_c";

    RationalData pab = rd;
    pab.b = 0.9;
    FtcVerdict vab = ftc_classify(pab);
    ok = ok && vab.kind == FtcVerdictKind::Reject && vab.reason == "degree_obstruction_ab";

    RationalData pw = rd;
    pw.Wpoly = PolyC({0.0, 1.0});
    FtcVerdict vw = ftc_classify(pw);
    ok = ok && vw.kind == FtcVerdictKind::Reject && vw.reason == "omega_not_p2_squared";

    std::mt19937 gen(2024u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int stable = 0;
    for (int trial = 0; trial < 20; ++trial) {
      Complex tau{u(gen) + 0.6, u(gen)}, gamma{u(gen), u(gen)};
      double norm = std::sqrt(std::norm(tau) + std::norm(gamma));
      tau /= norm;
      gamma /= norm;
      RationalData td = mobius_transform(rd, tau, gamma, 3.0 * u(gen));
      if (ftc_classify(td).kind == FtcVerdictKind::Admissible) ++stable;
    }
    ok = ok && stable == 20;
    line(8, "classifier normal form + mobius", ok,
         "rejects carry the stated codes; mobius stability " + std::to_string(stable) + "/20");
  }

  // ---- criterion 9: appendix solver -------------------------------------
  {
    std::mt19937 gen(7u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> f1, f2, f3, f4;
    for (int k = 0; k < 10; ++k) {
      Complex z{u(gen), u(gen)};
      f1.push_back(1.0);
      f3.push_back(z);
      f2.push_back(2.0 + Complex(1, 1) * z);
      f4.push_back(Complex(1, -1) + 3.0 * z);
    }
    ApenResult res = apen_decompose(f1, f2, f3, f4);
    bool exact = std::abs(res.a - 2.0) <= 1e-10 && std::abs(res.b - 3.0) <= 1e-10 &&
                 std::abs(res.c - Complex(1, 1)) <= 1e-10 && res.residual <= 1e-10;
    std::vector<Complex> f2_bad = f2;
    for (size_t k = 0; k < f1.size(); ++k)
      f2_bad[k] += 0.05 * (f3[k] * f3[k] + std::conj(f3[k] * f3[k]));
    ApenResult bad = apen_decompose(f1, f2_bad, f3, f4);
    line(9, "appendix decomposition solver", exact && bad.residual > 1e-3,
         "recovered (a,b,c) residual=" + fmt(res.residual) +
             "; perturbed residual=" + fmt(bad.residual) + " > 1e-03");
  }

  // ---- criterion 10: convergence order ----------------------------------
  {
    // The pinned criterion-1 data (g = z, w = 1) is polynomial, which both
    // integration routes reproduce to machine precision at every h, so it
    // carries no measurable h-dependence. The same minimal-type family
    // with transcendental w exposes the one-step and quadrature
    // truncation; a single substep per edge keeps the error scaling with
    // the lattice spacing.
    double errs[2];
    int sizes[2] = {33, 65};
    ExprPtr w = parse_expression("exp(z)");
    for (int t = 0; t < 2; ++t) {
      WeierstrassData d = enneper(-1, sizes[t]);
      d.w = w;
      GridField<HermPoint> oracle = weierstrass_closed_form(d.g, d.w, d.eps, d.grid, 1);
      DerivedData derived = build_f(d);
      FrameOptions opts;
      opts.min_substeps = 1;
      FrameField frame = integrate_frame(d, derived, opts);
      errs[t] = base_aligned_max_diff(d.grid, frame.psi, oracle);
    }
    double ratio = errs[0] / errs[1];
    line(10, "fourth-order convergence", ratio >= 12.0,
         "error(h=1/32)=" + fmt(errs[0]) + " error(h=1/64)=" + fmt(errs[1]) +
             " ratio=" + fmt(ratio) + " >= 12");
  }

  std::printf("ACCEPTANCE: %d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
