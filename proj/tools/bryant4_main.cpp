#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "bryant4/job.hpp"

using namespace bryant4;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  double tol_scale = 1.0;
  int grid_n = 0;
};

void attach(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (key = value lines)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--tol-scale", args.tol_scale, "multiply every residual tolerance");
  cmd->add_option("--grid-n", args.grid_n, "override grid_nx and grid_ny");
}

int execute(Pipeline pipeline, const CommonArgs& args) {
  try {
    JobConfig cfg = JobConfig::parse_file(args.config_path);
    if (args.grid_n > 0) cfg.grid_nx = cfg.grid_ny = args.grid_n;
    if (args.tol_scale != 1.0) cfg.tol_scale = args.tol_scale;
    JobResult result = run_job(cfg, pipeline, args.out_dir);
    for (const auto& line : result.report_lines) std::printf("%s\n", line.c_str());
    for (const auto& artifact : result.artifacts)
      std::fprintf(stderr, "wrote %s\n", artifact.c_str());
    return result.exit_code;
  } catch (const Error& err) {
    std::printf("error = %s\nmessage = %s\n", err.code().c_str(), err.what());
    return err.error_class() == ErrorClass::Validation ? 1 : 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bryant4: spacelike surfaces in Minkowski 4-space from meromorphic data"};
  app.require_subcommand(1);

  CommonArgs args;
  struct Entry {
    const char* name;
    const char* help;
    Pipeline pipeline;
  };
  const Entry entries[] = {
      {"generate", "construct the surface, verify it, and export a mesh", Pipeline::Generate},
      {"verify", "construct the surface and run every verifier (no mesh)", Pipeline::Verify},
      {"limits", "compare against the classical closed-form constructions", Pipeline::Limits},
      {"deform", "run the isometric deformation sweep to the zero-curvature limit",
       Pipeline::Deform},
      {"classify", "finite-total-curvature and degeneracy screening", Pipeline::Classify},
  };
  for (const auto& entry : entries) attach(app.add_subcommand(entry.name, entry.help), args);

  CLI11_PARSE(app, argc, argv);

  for (const auto& entry : entries)
    if (app.got_subcommand(entry.name)) return execute(entry.pipeline, args);
  return 1;
}
