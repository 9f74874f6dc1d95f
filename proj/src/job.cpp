#include "bryant4/job.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bryant4/errors.hpp"

namespace bryant4 {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (trim(value.substr(pos)).empty()) return v;
  } catch (...) {
  }
  throw validation_error("ConfigError", "key '" + key + "' expects a number, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
  double v = parse_double(key, value);
  int n = int(std::lround(v));
  if (std::abs(v - n) > 1e-12)
    throw validation_error("ConfigError", "key '" + key + "' expects an integer");
  return n;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

Pipeline pipeline_from_string(const std::string& name) {
  if (name == "generate") return Pipeline::Generate;
  if (name == "verify") return Pipeline::Verify;
  if (name == "limits") return Pipeline::Limits;
  if (name == "deform") return Pipeline::Deform;
  if (name == "classify") return Pipeline::Classify;
  throw validation_error("ConfigError", "unknown pipeline '" + name + "'");
}

JobConfig JobConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("ConfigError", "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

JobConfig JobConfig::parse_text(const std::string& text) {
  static const std::set<std::string> known = {
      "pipeline",  "g",         "w",         "eps",       "a",          "b",
      "c_re",      "c_im",      "f0_re",     "f0_im",     "z0_re",      "z0_im",
      "grid_xmin", "grid_xmax", "grid_ymin", "grid_ymax", "grid_nx",    "grid_ny",
      "substeps",  "base_x0",   "base_x1",   "base_x2",   "base_x3",    "projection",
      "mesh_format", "kind",    "r",         "r_list",    "tol_scale",
  };
  JobConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("ConfigError",
                             "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!known.count(key))
      throw validation_error("ConfigError",
                             "unknown key '" + key + "' on line " + std::to_string(lineno));

    if (key == "pipeline") cfg.pipeline = pipeline_from_string(value);
    else if (key == "g") cfg.g = value;
    else if (key == "w") cfg.w = value;
    else if (key == "eps") {
      cfg.eps = parse_int(key, value);
      if (cfg.eps != 1 && cfg.eps != -1)
        throw validation_error("ConfigError", "eps must be +1 or -1");
    } else if (key == "a") cfg.a = parse_double(key, value);
    else if (key == "b") cfg.b = parse_double(key, value);
    else if (key == "c_re") cfg.c.real(parse_double(key, value));
    else if (key == "c_im") cfg.c.imag(parse_double(key, value));
    else if (key == "f0_re") cfg.f0.real(parse_double(key, value));
    else if (key == "f0_im") cfg.f0.imag(parse_double(key, value));
    else if (key == "z0_re") cfg.z0.real(parse_double(key, value));
    else if (key == "z0_im") cfg.z0.imag(parse_double(key, value));
    else if (key == "grid_xmin") cfg.grid_xmin = parse_double(key, value);
    else if (key == "grid_xmax") cfg.grid_xmax = parse_double(key, value);
    else if (key == "grid_ymin") cfg.grid_ymin = parse_double(key, value);
    else if (key == "grid_ymax") cfg.grid_ymax = parse_double(key, value);
    else if (key == "grid_nx") cfg.grid_nx = parse_int(key, value);
    else if (key == "grid_ny") cfg.grid_ny = parse_int(key, value);
    else if (key == "substeps") cfg.substeps = parse_int(key, value);
    else if (key == "base_x0") cfg.base.x0 = parse_double(key, value);
    else if (key == "base_x1") cfg.base.x1 = parse_double(key, value);
    else if (key == "base_x2") cfg.base.x2 = parse_double(key, value);
    else if (key == "base_x3") cfg.base.x3 = parse_double(key, value);
    else if (key == "projection") {
      if (value == "drop_x0") cfg.projection = Projection::DropX0;
      else if (value == "drop_x3") cfg.projection = Projection::DropX3;
      else if (value == "poincare_ball") cfg.projection = Projection::PoincareBall;
      else throw validation_error("ConfigError", "unknown projection '" + value + "'");
    } else if (key == "mesh_format") {
      if (value != "obj" && value != "ply" && value != "both" && value != "none")
        throw validation_error("ConfigError", "unknown mesh_format '" + value + "'");
      cfg.mesh_format = value;
    } else if (key == "kind") cfg.kind = value;
    else if (key == "r") cfg.r = parse_double(key, value);
    else if (key == "r_list") {
      cfg.r_list.clear();
      std::istringstream rs(value);
      std::string tok;
      while (std::getline(rs, tok, ',')) cfg.r_list.push_back(parse_double(key, trim(tok)));
      if (cfg.r_list.empty())
        throw validation_error("ConfigError", "r_list must contain at least one value");
    } else if (key == "tol_scale") cfg.tol_scale = parse_double(key, value);
  }
  return cfg;
}

WeierstrassData JobConfig::weierstrass_data() const {
  WeierstrassData d;
  d.g = parse_expression(g);
  d.w = parse_expression(w);
  d.eps = eps;
  d.a = a;
  d.b = b;
  d.c = c;
  d.f0 = f0;
  d.grid = DomainGrid::rect(grid_xmin, grid_xmax, grid_ymin, grid_ymax, grid_nx, grid_ny, z0);
  d.panels_per_edge = substeps;
  return d;
}

namespace {

struct ReportWriter {
  std::vector<std::string> lines;

  void kv(const std::string& key, const std::string& value) {
    lines.push_back(key + " = " + value);
  }
  void kv(const std::string& key, double value) { kv(key, fmt(value)); }

  void add_report(const SurfaceReport& report) {
    for (const auto& row : report.rows) kv(row.key, row.value);
    for (const auto& row : report.rows)
      if (!row.within()) kv(row.key + "_within", "false");
    for (const auto& [key, value] : report.flags) kv(key, value);
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    for (const auto& line : lines) out << line << "\n";
  }
};

Projection default_projection(int eps) {
  return eps == -1 ? Projection::DropX0 : Projection::DropX3;
}

LimitKind kind_from_string(const std::string& s) {
  if (s == "minimal_R3") return LimitKind::MinimalR3;
  if (s == "maximal_L3") return LimitKind::MaximalL3;
  if (s == "cmc_H3") return LimitKind::CmcH3;
  if (s == "cmc_S3") return LimitKind::CmcS3;
  throw validation_error("ConfigError", "unknown limit kind '" + s + "'");
}

JobResult run_generate(const JobConfig& cfg, bool with_mesh, const std::string& out_dir,
                       const Tolerances& tol) {
  WeierstrassData data = cfg.weierstrass_data();
  mask_singularities(data, tol);

  ReportWriter rep;
  rep.kv("pipeline", with_mesh ? "generate" : "verify");
  rep.kv("eps", double(cfg.eps));
  rep.kv("nodes_total", double(data.grid.nx * data.grid.ny));

  ScreenVerdict screen = completeness_screen(data, tol);
  if (screen.kind == ScreenVerdictKind::DegenerateFlat)
    throw validation_error("FlatSurfaceRefused", screen.detail);
  if (screen.kind == ScreenVerdictKind::CompletenessWarning)
    rep.kv("completeness_warning", screen.detail);

  C1Report c1 = validate_C1(data, tol);
  rep.kv("c1_min_margin", c1.min_margin);

  DerivedData derived = build_f(data, tol);
  if (derived.flat)
    throw validation_error("FlatSurfaceRefused",
                           "the Hopf density vanishes identically (flat degenerate case)");
  for (const auto& wmsg : derived.warnings) rep.kv("warning", wmsg);
  rep.kv("nodes_masked", double(derived.grid.nx * derived.grid.ny - derived.grid.unmasked_count()));

  C2Report c2 = validate_C2(data, derived, tol);
  rep.kv("c2_loop_residual_max", c2.max_loop_residual);

  FrameOptions opts;
  opts.psi0 = to_herm(cfg.base);
  opts.min_substeps = cfg.substeps;
  FrameField frame = integrate_frame(data, derived, opts, tol);

  VerifiedSurface verified = verify_surface(data, derived, frame, tol);
  rep.add_report(verified.report);

  ParallelHVerdict ph = parallel_H_classify(data, derived);
  rep.kv("parallel_H_kind", ph.kind == ParallelHKind::NonParallel
                                ? "non_parallel"
                                : (ph.kind == ParallelHKind::ZeroMeanCurvature
                                       ? "zero_mean_curvature"
                                       : "hyperquadric"));

  JobResult result;
  result.exit_code = verified.report.all_within() ? 0 : 1;
  rep.kv("status", result.exit_code == 0 ? "pass" : "fail");

  std::filesystem::create_directories(out_dir);
  if (with_mesh && cfg.mesh_format != "none") {
    WeierstrassData masked_view = data;
    masked_view.grid = derived.grid;
    Projection proj = cfg.projection.value_or(default_projection(cfg.eps));
    MeshOutput mesh =
        build_mesh(masked_view, frame.psi, proj, &verified.K, &verified.hh_ratio, tol);
    if (cfg.mesh_format == "obj" || cfg.mesh_format == "both") {
      std::string path = out_dir + "/surface.obj";
      write_obj(mesh, path);
      result.artifacts.push_back(path);
    }
    if (cfg.mesh_format == "ply" || cfg.mesh_format == "both") {
      std::string path = out_dir + "/surface.ply";
      write_ply(mesh, path);
      result.artifacts.push_back(path);
    }
  }
  std::string report_path = out_dir + "/report.txt";
  rep.write(report_path);
  result.artifacts.push_back(report_path);
  result.report_lines = rep.lines;
  return result;
}

JobResult run_limits(const JobConfig& cfg, const std::string& out_dir, const Tolerances& tol) {
  LimitCase lc{kind_from_string(cfg.kind), cfg.r};
  ExprPtr g = parse_expression(cfg.g);
  ExprPtr w = parse_expression(cfg.w);
  DomainGrid grid = DomainGrid::rect(cfg.grid_xmin, cfg.grid_xmax, cfg.grid_ymin, cfg.grid_ymax,
                                     cfg.grid_nx, cfg.grid_ny, cfg.z0);

  ReportWriter rep;
  rep.kv("pipeline", "limits");
  rep.kv("kind", cfg.kind);
  bool ok = true;

  if (!lc.is_cmc()) {
    // Closed form against the general pipeline with the same data.
    GridField<HermPoint> oracle = weierstrass_closed_form(g, w, lc.eps(), grid, cfg.substeps, tol);
    WeierstrassData data;
    data.g = g;
    data.w = w;
    data.eps = lc.eps();
    data.grid = grid;
    data.panels_per_edge = cfg.substeps;
    DerivedData derived = build_f(data, tol);
    FrameField frame = integrate_frame(data, derived, FrameOptions{}, tol);
    double diff = base_aligned_max_diff(grid, frame.psi, oracle);
    rep.kv("oracle_max_diff", diff);
    ok = diff <= tol.tol_oracle;
  } else {
    BryantCurveResult bryant = bryant_null_curve(g, w, lc.eps(), lc.r, grid, tol);
    rep.kv("det_B_drift_max", bryant.det_B_drift_max);
    rep.kv("null_curve_ratio_max", bryant.null_ratio_max);
    rep.kv("hyperquadric_rel_max", bryant.hyperquadric_rel_max);
    // The general pipeline on the same data, based at Delta(z0)/r.
    WeierstrassData data;
    data.g = g;
    data.w = w;
    data.eps = lc.eps();
    data.a = lc.r;
    data.b = -double(lc.eps()) * lc.r;
    data.grid = grid;
    data.panels_per_edge = cfg.substeps;
    DerivedData derived = build_f(data, tol);
    FrameOptions opts;
    Complex g0 = g->eval(grid.base_point(), tol.pole_eps);
    double e = double(lc.eps());
    opts.psi0 = HermPoint(-e / lc.r, e * std::conj(g0) / lc.r,
                          (1.0 - e * std::norm(g0)) / lc.r);
    FrameField frame = integrate_frame(data, derived, opts, tol);
    double diff = base_aligned_max_diff(grid, frame.psi, bryant.psi);
    rep.kv("oracle_max_diff", diff);
    double omega_err = 0;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!grid.open(i, j)) continue;
        Complex gz = g->eval(grid.node(i, j), tol.pole_eps);
        HermPoint expected(-e / lc.r, e * std::conj(gz) / lc.r,
                           (1.0 - e * std::norm(gz)) / lc.r);
        omega_err = std::max(omega_err, (frame.Omega.at(i, j) - expected).max_abs());
      }
    rep.kv("omega_match_max", omega_err);
    ok = diff <= tol.tol_oracle && bryant.null_ratio_max <= tol.tol_null &&
         bryant.hyperquadric_rel_max <= tol.tol_geo && omega_err <= tol.tol_oracle &&
         bryant.det_B_drift_max <= tol.tol_det * 10;
  }

  JobResult result;
  result.exit_code = ok ? 0 : 1;
  rep.kv("status", ok ? "pass" : "fail");
  std::filesystem::create_directories(out_dir);
  std::string report_path = out_dir + "/report.txt";
  rep.write(report_path);
  result.artifacts.push_back(report_path);
  result.report_lines = rep.lines;
  return result;
}

JobResult run_deform(const JobConfig& cfg, const std::string& out_dir, const Tolerances& tol) {
  ExprPtr g = parse_expression(cfg.g);
  ExprPtr w = parse_expression(cfg.w);
  DomainGrid grid = DomainGrid::rect(cfg.grid_xmin, cfg.grid_xmax, cfg.grid_ymin, cfg.grid_ymax,
                                     cfg.grid_nx, cfg.grid_ny, cfg.z0);
  int eps = cfg.kind == "maximal_L3" || cfg.kind == "cmc_S3" ? 1 : cfg.eps;
  DeformationFamily fam = deformation_family(g, w, eps, cfg.r_list, grid, 4, tol);

  ReportWriter rep;
  rep.kv("pipeline", "deform");
  rep.kv("slope", fam.slope);
  rep.kv("limit_mean_curvature_max", fam.limit_mean_curvature_max);
  rep.kv("oracle_procrustes_residual", fam.oracle_residual);
  rep.kv("metric_r_variation_max", fam.metric_r_variation_max);

  bool ok = fam.slope >= 0.9 && fam.slope <= 1.1 && fam.limit_mean_curvature_max <= 1e-5 &&
            fam.oracle_residual <= 1e-5 && fam.metric_r_variation_max <= tol.tol_geo;
  JobResult result;
  result.exit_code = ok ? 0 : 1;
  rep.kv("status", ok ? "pass" : "fail");

  std::filesystem::create_directories(out_dir);
  std::string csv_path = out_dir + "/deformation.csv";
  {
    std::ofstream csv(csv_path, std::ios::binary);
    csv << "r,sup_difference,slope_estimate\n";
    for (size_t t = 0; t < fam.r_values.size(); ++t) {
      double pair_slope = 0;
      if (t + 1 < fam.r_values.size())
        pair_slope = std::log(fam.sup_difference[t] / fam.sup_difference[t + 1]) /
                     std::log(fam.r_values[t] / fam.r_values[t + 1]);
      csv << fmt(fam.r_values[t]) << "," << fmt(fam.sup_difference[t]) << ","
          << fmt(pair_slope) << "\n";
    }
  }
  result.artifacts.push_back(csv_path);
  std::string report_path = out_dir + "/report.txt";
  rep.write(report_path);
  result.artifacts.push_back(report_path);
  result.report_lines = rep.lines;
  return result;
}

JobResult run_classify(const JobConfig& cfg, const std::string& out_dir, const Tolerances& tol) {
  ExprPtr g = parse_expression(cfg.g);
  ExprPtr w = parse_expression(cfg.w);
  auto grat = to_rational(*g);
  auto wpoly = to_polynomial(*w);
  if (!grat) throw validation_error("ConfigError", "classify requires rational g");
  if (!wpoly) throw validation_error("ConfigError", "classify requires polynomial w");

  RationalData rd{grat->first, grat->second, *wpoly, cfg.eps, cfg.a, cfg.b, cfg.c};
  FtcVerdict verdict = ftc_classify(rd);

  ReportWriter rep;
  rep.kv("pipeline", "classify");
  rep.kv("ftc_verdict",
         verdict.kind == FtcVerdictKind::Admissible ? "AdmissibleFTC" : "Reject");
  if (!verdict.reason.empty()) rep.kv("ftc_reject_reason", verdict.reason);
  if (!verdict.detail.empty()) rep.kv("ftc_detail", verdict.detail);
  if (verdict.mobius_applied) rep.kv("ftc_mobius_normalization", verdict.mobius_log);

  // Grid-based screens on the same data.
  WeierstrassData data = cfg.weierstrass_data();
  ScreenVerdict screen = completeness_screen(data, tol);
  rep.kv("completeness_screen",
         screen.kind == ScreenVerdictKind::NotApplicable
             ? "not_applicable"
             : (screen.kind == ScreenVerdictKind::DegenerateFlat ? "degenerate_flat"
                                                                 : "completeness_warning"));
  if (screen.kind != ScreenVerdictKind::DegenerateFlat) {
    DerivedData derived = build_f(data, tol);
    ParallelHVerdict ph = parallel_H_classify(data, derived);
    rep.kv("parallel_H_kind", ph.kind == ParallelHKind::NonParallel
                                  ? "non_parallel"
                                  : (ph.kind == ParallelHKind::ZeroMeanCurvature
                                         ? "zero_mean_curvature"
                                         : "hyperquadric"));
  }

  JobResult result;
  result.exit_code = 0;
  rep.kv("status", "pass");
  std::filesystem::create_directories(out_dir);
  std::string report_path = out_dir + "/report.txt";
  rep.write(report_path);
  result.artifacts.push_back(report_path);
  result.report_lines = rep.lines;
  return result;
}

}  // namespace

JobResult run_job(const JobConfig& config, Pipeline pipeline, const std::string& out_dir) {
  Tolerances tol;
  tol.scale(config.tol_scale);
  try {
    switch (pipeline) {
      case Pipeline::Generate: return run_generate(config, true, out_dir, tol);
      case Pipeline::Verify: return run_generate(config, false, out_dir, tol);
      case Pipeline::Limits: return run_limits(config, out_dir, tol);
      case Pipeline::Deform: return run_deform(config, out_dir, tol);
      case Pipeline::Classify: return run_classify(config, out_dir, tol);
    }
    return {};
  } catch (const Error& err) {
    JobResult result;
    result.exit_code = err.error_class() == ErrorClass::Validation ? 1 : 2;
    result.report_lines.push_back("error = " + err.code());
    result.report_lines.push_back("message = " + std::string(err.what()));
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/report.txt", std::ios::binary);
    for (const auto& line : result.report_lines) out << line << "\n";
    result.artifacts.push_back(out_dir + "/report.txt");
    return result;
  }
}

}  // namespace bryant4
