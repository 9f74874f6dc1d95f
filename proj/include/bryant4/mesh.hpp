#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bryant4/geometry.hpp"

namespace bryant4 {

enum class Projection { DropX0, DropX3, PoincareBall };
enum class MeshFormat { Obj, Ply };

struct MeshOutput {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 4>> quads;       // zero-based vertex indices
  std::vector<double> channel_K;
  std::vector<double> channel_hh_residual;
  std::vector<double> channel_abs_g;
  std::string header_note;
};

// Projects the immersion grid to 3-space and triangulates the grid cells
// whose four corners are unmasked; masked nodes are dropped with
// consistent re-indexing. The ball projection applies only to surfaces
// contained in a hyperbolic hyperquadric (ProjectionInvalid otherwise).
MeshOutput build_mesh(const WeierstrassData& data, const GridField<HermPoint>& psi,
                      Projection projection, const GridField<double>* K = nullptr,
                      const GridField<double>* hh_ratio = nullptr,
                      const Tolerances& tol = {});

// Deterministic writers: identical input produces byte-identical files.
void write_obj(const MeshOutput& mesh, const std::string& path);
void write_ply(const MeshOutput& mesh, const std::string& path);

}  // namespace bryant4
