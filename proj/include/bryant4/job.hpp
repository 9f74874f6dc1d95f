#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bryant4/classical_limits.hpp"
#include "bryant4/classifier.hpp"
#include "bryant4/mesh.hpp"

namespace bryant4 {

enum class Pipeline { Generate, Verify, Limits, Deform, Classify };

// Flat key = value configuration document; unknown keys are rejected.
struct JobConfig {
  std::optional<Pipeline> pipeline;
  std::string g = "z", w = "1";
  int eps = -1;
  double a = 0, b = 0;
  Complex c{}, f0{1, 0}, z0{};
  double grid_xmin = -0.5, grid_xmax = 0.5, grid_ymin = -0.5, grid_ymax = 0.5;
  int grid_nx = 65, grid_ny = 65;
  int substeps = 4;
  SpacetimeVec base;
  std::optional<Projection> projection;
  std::string mesh_format = "obj";  // obj | ply | both | none
  std::string kind = "minimal_R3";
  double r = 1.0;
  std::vector<double> r_list{0.4, 0.2, 0.1, 0.05, 0.025};
  double tol_scale = 1.0;

  static JobConfig parse_file(const std::string& path);
  static JobConfig parse_text(const std::string& text);

  WeierstrassData weierstrass_data() const;
};

struct JobResult {
  int exit_code = 0;
  std::vector<std::string> report_lines;
  std::vector<std::string> artifacts;  // files written
};

// Executes the selected pipeline, writes the report (and mesh/CSV
// artifacts) under out_dir. Exit code 0 when every checked residual is
// within tolerance, 1 on validation failure, 2 on numeric failure; error
// runs still produce a machine-readable report block.
JobResult run_job(const JobConfig& config, Pipeline pipeline, const std::string& out_dir);

Pipeline pipeline_from_string(const std::string& name);

}  // namespace bryant4
