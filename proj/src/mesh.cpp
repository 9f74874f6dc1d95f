#include "bryant4/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bryant4/errors.hpp"

namespace bryant4 {

MeshOutput build_mesh(const WeierstrassData& data, const GridField<HermPoint>& psi,
                      Projection projection, const GridField<double>* K,
                      const GridField<double>* hh_ratio, const Tolerances& tol) {
  const DomainGrid& grid = data.grid;
  MeshOutput mesh;

  double r = 0;
  if (projection == Projection::PoincareBall) {
    // The ball model needs <psi, psi> = -1/r^2 < 0 with x0 > 0 across the
    // grid; read r off the surface and verify constancy.
    double det_ref = quiet_nan();
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!grid.open(i, j)) continue;
        double inner = -psi.at(i, j).det();
        if (!std::isfinite(det_ref)) det_ref = inner;
        if (inner >= 0 || std::abs(inner - det_ref) > 1e-4 * std::abs(det_ref))
          throw validation_error("ProjectionInvalid",
                                 "surface is not contained in a hyperbolic hyperquadric");
        if (from_herm(psi.at(i, j)).x0 <= 0)
          throw validation_error("ProjectionInvalid", "surface leaves the x0 > 0 sheet");
      }
    if (!std::isfinite(det_ref))
      throw validation_error("ProjectionInvalid", "no unmasked nodes");
    r = 1.0 / std::sqrt(-det_ref);
    char note[96];
    std::snprintf(note, sizeof(note), "poincare_ball r=%.12g map x_i/(1/r + x0)", r);
    mesh.header_note = note;
  } else {
    mesh.header_note = projection == Projection::DropX0 ? "projection drop_x0"
                                                        : "projection drop_x3";
  }

  GridField<int> vertex_index(grid.nx, grid.ny, -1);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.open(i, j)) continue;
      SpacetimeVec v = from_herm(psi.at(i, j));
      std::array<double, 3> p{};
      switch (projection) {
        case Projection::DropX0: p = {v.x1, v.x2, v.x3}; break;
        case Projection::DropX3: p = {v.x0, v.x1, v.x2}; break;
        case Projection::PoincareBall: {
          double denom = 1.0 / r + v.x0;
          p = {v.x1 / denom, v.x2 / denom, v.x3 / denom};
          break;
        }
      }
      vertex_index.at(i, j) = int(mesh.vertices.size());
      mesh.vertices.push_back(p);
      mesh.channel_K.push_back(K && std::isfinite(K->at(i, j)) ? K->at(i, j) : 0.0);
      mesh.channel_hh_residual.push_back(
          hh_ratio && std::isfinite(hh_ratio->at(i, j)) ? hh_ratio->at(i, j) : 0.0);
      mesh.channel_abs_g.push_back(std::abs(data.g->eval(grid.node(i, j), tol.pole_eps)));
    }
  }

  for (int j = 0; j + 1 < grid.ny; ++j)
    for (int i = 0; i + 1 < grid.nx; ++i) {
      int v00 = vertex_index.at(i, j), v10 = vertex_index.at(i + 1, j);
      int v11 = vertex_index.at(i + 1, j + 1), v01 = vertex_index.at(i, j + 1);
      if (v00 < 0 || v10 < 0 || v11 < 0 || v01 < 0) continue;
      mesh.quads.push_back({v00, v10, v11, v01});
    }
  return mesh;
}

void write_obj(const MeshOutput& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw numeric_error("IoError", "cannot open " + path);
  out << "# " << mesh.header_note << "\n";
  char line[160];
  for (const auto& v : mesh.vertices) {
    std::snprintf(line, sizeof(line), "v %.9g %.9g %.9g\n", v[0], v[1], v[2]);
    out << line;
  }
  for (const auto& q : mesh.quads) {
    std::snprintf(line, sizeof(line), "f %d %d %d %d\n", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1);
    out << line;
  }
}

void write_ply(const MeshOutput& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw numeric_error("IoError", "cannot open " + path);
  out << "ply\nformat ascii 1.0\n";
  out << "comment " << mesh.header_note << "\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "property float gauss_curvature\nproperty float hh_residual\nproperty float abs_g\n";
  out << "element face " << mesh.quads.size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  char line[224];
  for (size_t k = 0; k < mesh.vertices.size(); ++k) {
    const auto& v = mesh.vertices[k];
    std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %.9g %.9g %.9g\n", v[0], v[1], v[2],
                  mesh.channel_K[k], mesh.channel_hh_residual[k], mesh.channel_abs_g[k]);
    out << line;
  }
  for (const auto& q : mesh.quads) {
    std::snprintf(line, sizeof(line), "4 %d %d %d %d\n", q[0], q[1], q[2], q[3]);
    out << line;
  }
}

}  // namespace bryant4
