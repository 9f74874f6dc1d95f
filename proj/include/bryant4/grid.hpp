#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "bryant4/lorentz.hpp"

namespace bryant4 {

template <typename T>
class GridField {
 public:
  GridField() = default;
  GridField(int nx, int ny, T init = T{}) : nx_(nx), ny_(ny), data_(size_t(nx) * size_t(ny), init) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  T& at(int i, int j) { return data_[size_t(j) * size_t(nx_) + size_t(i)]; }
  const T& at(int i, int j) const { return data_[size_t(j) * size_t(nx_) + size_t(i)]; }
  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

 private:
  int nx_ = 0, ny_ = 0;
  std::vector<T> data_;
};

// Rectangular sampling grid in C with a base node and a mask of excluded
// nodes. The unmasked node graph must stay connected and hole-free (a
// masked island in the interior makes the region non-simply-connected,
// which the construction refuses).
struct DomainGrid {
  double xmin = -0.5, xmax = 0.5, ymin = -0.5, ymax = 0.5;
  int nx = 65, ny = 65;
  int i0 = 32, j0 = 32;
  std::vector<uint8_t> mask;  // nonzero = excluded

  static DomainGrid square(double half_width, int n, Complex base = {});
  static DomainGrid rect(double xmin, double xmax, double ymin, double ymax, int nx, int ny,
                         Complex base);

  double hx() const { return (xmax - xmin) / double(nx - 1); }
  double hy() const { return (ymax - ymin) / double(ny - 1); }
  double h() const { return std::max(hx(), hy()); }

  Complex node(int i, int j) const {
    return {xmin + hx() * double(i), ymin + hy() * double(j)};
  }
  Complex base_point() const { return node(i0, j0); }
  size_t index(int i, int j) const { return size_t(j) * size_t(nx) + size_t(i); }
  bool in_range(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  bool masked(int i, int j) const { return mask[index(i, j)] != 0; }
  bool open(int i, int j) const { return in_range(i, j) && !masked(i, j); }

  void mask_node(int i, int j) { mask[index(i, j)] = 1; }
  void mask_disk(Complex center, double radius);
  int unmasked_count() const;

  // Throws GridDisconnected when some unmasked node is unreachable from the
  // base, GridNotSimplyConnected when a masked island sits in the interior,
  // and BasePointMasked when the base node itself is excluded.
  void validate_connectivity() const;
};

// Breadth-first spanning tree of the unmasked node graph rooted at the
// base node. The two sweep orders visit neighbors in different sequences,
// producing genuinely different trees for path-independence tests.
struct SpanningTree {
  enum class Sweep { RowMajor, ColMajor };

  struct Step {
    int i, j;            // node reached
    int pi, pj;          // parent node
  };
  std::vector<Step> order;  // root excluded; parents always precede children

  static SpanningTree build(const DomainGrid& grid, Sweep sweep);
};

// Lattice edges between adjacent unmasked nodes. Horizontal edge (i,j)
// spans node(i,j) -> node(i+1,j); vertical edge spans node(i,j) -> node(i,j+1).
struct EdgeSet {
  GridField<uint8_t> horizontal;  // nx-1 x ny
  GridField<uint8_t> vertical;    // nx x ny-1
  static EdgeSet of(const DomainGrid& grid);
};

struct PathPrimitiveResult {
  GridField<Complex> values;
  double max_loop_residual = 0;  // scaled by cell size and integrand magnitude
};

// Primitive P of e with P(base) = 0 and dP = e dz, via composite 2-point
// Gauss-Legendre panels along spanning-tree edges. Every interior cell is
// closed up and the worst scaled loop residual is reported; a residual
// above tol_loop signals a pole inside the region (LoopClosureFailure).
PathPrimitiveResult path_primitive(const std::function<Complex(Complex)>& e,
                                   const DomainGrid& grid, const SpanningTree& tree,
                                   int panels_per_edge = 4, double tol_loop = 1e-9);

// Single-segment composite Gauss-Legendre integral of e from za to zb.
Complex segment_integral(const std::function<Complex(Complex)>& e, Complex za, Complex zb,
                         int panels);

// ---- finite-difference stencils ---------------------------------------
//
// Fourth-order derivatives along grid lines. Windows slide near
// boundaries and masked nodes, so every unmasked node with enough
// consecutive unmasked line-neighbors is covered. Returns nullopt when no
// admissible window exists.

std::optional<double> fd_dx(const DomainGrid& g, const GridField<double>& f, int i, int j);
std::optional<double> fd_dy(const DomainGrid& g, const GridField<double>& f, int i, int j);
std::optional<double> fd_dxx(const DomainGrid& g, const GridField<double>& f, int i, int j);
std::optional<double> fd_dyy(const DomainGrid& g, const GridField<double>& f, int i, int j);

std::optional<Complex> fd_dx(const DomainGrid& g, const GridField<Complex>& f, int i, int j);
std::optional<Complex> fd_dy(const DomainGrid& g, const GridField<Complex>& f, int i, int j);

// Sixth-order centered derivatives of a holomorphic grid (d/dz = d/dx on
// grid lines), plus a sixth-order third derivative. Interior-only.
std::optional<Complex> fd_dz6(const DomainGrid& g, const GridField<Complex>& f, int i, int j);
std::optional<Complex> fd_dzz6(const DomainGrid& g, const GridField<Complex>& f, int i, int j);
std::optional<Complex> fd_dzzz6(const DomainGrid& g, const GridField<Complex>& f, int i, int j);

inline double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace bryant4
