#include "bryant4/grid.hpp"

#include <array>
#include <cmath>
#include <deque>

#include "bryant4/errors.hpp"

namespace bryant4 {

DomainGrid DomainGrid::square(double half_width, int n, Complex base) {
  return rect(-half_width, half_width, -half_width, half_width, n, n, base);
}

DomainGrid DomainGrid::rect(double xmin, double xmax, double ymin, double ymax, int nx, int ny,
                            Complex base) {
  DomainGrid g;
  g.xmin = xmin;
  g.xmax = xmax;
  g.ymin = ymin;
  g.ymax = ymax;
  g.nx = nx;
  g.ny = ny;
  g.mask.assign(size_t(nx) * size_t(ny), 0);
  double fi = (base.real() - xmin) / g.hx();
  double fj = (base.imag() - ymin) / g.hy();
  g.i0 = int(std::lround(fi));
  g.j0 = int(std::lround(fj));
  if (!g.in_range(g.i0, g.j0) || std::abs(fi - g.i0) > 1e-9 || std::abs(fj - g.j0) > 1e-9)
    throw validation_error("ConfigError", "base point is not a grid node");
  return g;
}

void DomainGrid::mask_disk(Complex center, double radius) {
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (std::abs(node(i, j) - center) <= radius) mask_node(i, j);
}

int DomainGrid::unmasked_count() const {
  int n = 0;
  for (uint8_t m : mask) n += (m == 0);
  return n;
}

void DomainGrid::validate_connectivity() const {
  if (masked(i0, j0)) throw validation_error("BasePointMasked", "base node is masked");
  // Reachability of unmasked nodes from the base.
  std::vector<uint8_t> seen(mask.size(), 0);
  std::deque<std::pair<int, int>> queue{{i0, j0}};
  seen[index(i0, j0)] = 1;
  int reached = 0;
  while (!queue.empty()) {
    auto [i, j] = queue.front();
    queue.pop_front();
    ++reached;
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int ni = i + di[k], nj = j + dj[k];
      if (open(ni, nj) && !seen[index(ni, nj)]) {
        seen[index(ni, nj)] = 1;
        queue.emplace_back(ni, nj);
      }
    }
  }
  if (reached != unmasked_count())
    throw validation_error("GridDisconnected",
                           "masking disconnects the grid; unreachable unmasked nodes exist");
  // A masked component that does not touch the boundary is an interior
  // hole; the domain is then not simply connected.
  std::vector<uint8_t> mseen(mask.size(), 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!masked(i, j) || mseen[index(i, j)]) continue;
      bool touches_boundary = false;
      std::deque<std::pair<int, int>> q{{i, j}};
      mseen[index(i, j)] = 1;
      while (!q.empty()) {
        auto [ci, cj] = q.front();
        q.pop_front();
        if (ci == 0 || cj == 0 || ci == nx - 1 || cj == ny - 1) touches_boundary = true;
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int ni = ci + di[k], nj = cj + dj[k];
          if (in_range(ni, nj) && masked(ni, nj) && !mseen[index(ni, nj)]) {
            mseen[index(ni, nj)] = 1;
            q.emplace_back(ni, nj);
          }
        }
      }
      if (!touches_boundary)
        throw validation_error(
            "GridNotSimplyConnected",
            "masked island in the interior; the unmasked region is not simply connected");
    }
  }
}

SpanningTree SpanningTree::build(const DomainGrid& grid, Sweep sweep) {
  grid.validate_connectivity();
  SpanningTree tree;
  std::vector<uint8_t> seen(grid.mask.size(), 0);
  std::deque<std::pair<int, int>> queue{{grid.i0, grid.j0}};
  seen[grid.index(grid.i0, grid.j0)] = 1;
  // Neighbor visit order differs per sweep so the trees genuinely differ.
  const std::array<std::pair<int, int>, 4> row_order{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  const std::array<std::pair<int, int>, 4> col_order{{{0, 1}, {0, -1}, {1, 0}, {-1, 0}}};
  const auto& order = sweep == Sweep::RowMajor ? row_order : col_order;
  while (!queue.empty()) {
    auto [i, j] = queue.front();
    queue.pop_front();
    for (const auto& [di, dj] : order) {
      int ni = i + di, nj = j + dj;
      if (grid.open(ni, nj) && !seen[grid.index(ni, nj)]) {
        seen[grid.index(ni, nj)] = 1;
        tree.order.push_back({ni, nj, i, j});
        queue.emplace_back(ni, nj);
      }
    }
  }
  return tree;
}

EdgeSet EdgeSet::of(const DomainGrid& grid) {
  EdgeSet e;
  e.horizontal = GridField<uint8_t>(grid.nx - 1, grid.ny, 0);
  e.vertical = GridField<uint8_t>(grid.nx, grid.ny - 1, 0);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i + 1 < grid.nx; ++i)
      if (grid.open(i, j) && grid.open(i + 1, j)) e.horizontal.at(i, j) = 1;
  for (int j = 0; j + 1 < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (grid.open(i, j) && grid.open(i, j + 1)) e.vertical.at(i, j) = 1;
  return e;
}

Complex segment_integral(const std::function<Complex(Complex)>& e, Complex za, Complex zb,
                         int panels) {
  // Two-point Gauss-Legendre per panel.
  static const double node_offset = 0.5 / std::sqrt(3.0);
  Complex total{};
  Complex dz = (zb - za) / double(panels);
  for (int p = 0; p < panels; ++p) {
    Complex mid = za + (double(p) + 0.5) * dz;
    total += 0.5 * dz * (e(mid - node_offset * dz) + e(mid + node_offset * dz));
  }
  return total;
}

PathPrimitiveResult path_primitive(const std::function<Complex(Complex)>& e,
                                   const DomainGrid& grid, const SpanningTree& tree,
                                   int panels_per_edge, double tol_loop) {
  EdgeSet edges = EdgeSet::of(grid);
  GridField<Complex> hint(grid.nx - 1, grid.ny, Complex{});
  GridField<Complex> vint(grid.nx, grid.ny - 1, Complex{});
  GridField<double> hmag(grid.nx - 1, grid.ny, 0.0);
  GridField<double> vmag(grid.nx, grid.ny - 1, 0.0);

  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i + 1 < grid.nx; ++i) {
      if (!edges.horizontal.at(i, j)) continue;
      Complex za = grid.node(i, j), zb = grid.node(i + 1, j);
      hint.at(i, j) = segment_integral(e, za, zb, panels_per_edge);
      hmag.at(i, j) = std::max(std::abs(e(za)), std::abs(e(zb)));
    }
  }
  for (int j = 0; j + 1 < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!edges.vertical.at(i, j)) continue;
      Complex za = grid.node(i, j), zb = grid.node(i, j + 1);
      vint.at(i, j) = segment_integral(e, za, zb, panels_per_edge);
      vmag.at(i, j) = std::max(std::abs(e(za)), std::abs(e(zb)));
    }
  }

  PathPrimitiveResult result;
  result.values = GridField<Complex>(grid.nx, grid.ny, Complex(quiet_nan(), quiet_nan()));
  result.values.at(grid.i0, grid.j0) = 0.0;
  for (const auto& s : tree.order) {
    Complex parent = result.values.at(s.pi, s.pj);
    Complex inc;
    if (s.j == s.pj) {
      inc = s.i > s.pi ? hint.at(s.pi, s.pj) : -hint.at(s.i, s.j);
    } else {
      inc = s.j > s.pj ? vint.at(s.pi, s.pj) : -vint.at(s.i, s.j);
    }
    result.values.at(s.i, s.j) = parent + inc;
  }

  // Close every fully-open cell.
  double perimeter = 2.0 * (grid.hx() + grid.hy());
  for (int j = 0; j + 1 < grid.ny; ++j) {
    for (int i = 0; i + 1 < grid.nx; ++i) {
      if (!(grid.open(i, j) && grid.open(i + 1, j) && grid.open(i, j + 1) &&
            grid.open(i + 1, j + 1)))
        continue;
      Complex loop = hint.at(i, j) + vint.at(i + 1, j) - hint.at(i, j + 1) - vint.at(i, j);
      double mag = std::max(std::max(hmag.at(i, j), hmag.at(i, j + 1)),
                            std::max(vmag.at(i, j), vmag.at(i + 1, j)));
      double scale = std::max(1.0, perimeter * mag);
      result.max_loop_residual = std::max(result.max_loop_residual, std::abs(loop) / scale);
    }
  }
  if (result.max_loop_residual > tol_loop)
    throw numeric_error("LoopClosureFailure",
                        "loop closure residual " + std::to_string(result.max_loop_residual) +
                            " exceeds tolerance; pole inside region or resolution too low");
  return result;
}

// ---- stencils ----------------------------------------------------------

namespace {

// First derivative, 4th order, 5-point windows; row p holds the weights
// when the evaluation node sits at offset p inside the window.
constexpr double kD1[5][5] = {
    {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4},
    {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12},
    {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
    {-1.0 / 12, 1.0 / 2, -3.0 / 2, 5.0 / 6, 1.0 / 4},
    {1.0 / 4, -4.0 / 3, 3.0, -4.0, 25.0 / 12},
};

// Second derivative, 4th order, 6-point windows.
constexpr double kD2[6][6] = {
    {15.0 / 4, -77.0 / 6, 107.0 / 6, -13.0, 61.0 / 12, -5.0 / 6},
    {5.0 / 6, -5.0 / 4, -1.0 / 3, 7.0 / 6, -1.0 / 2, 1.0 / 12},
    {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12, 0.0},
    {0.0, -1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12},
    {1.0 / 12, -1.0 / 2, 7.0 / 6, -1.0 / 3, -5.0 / 4, 5.0 / 6},
    {-5.0 / 6, 61.0 / 12, -13.0, 107.0 / 6, -77.0 / 6, 15.0 / 4},
};

constexpr double kDz6[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
constexpr double kDzz6[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
constexpr double kDzzz6[9] = {-7.0 / 240,  3.0 / 10,   -169.0 / 120, 61.0 / 30, 0.0,
                              -61.0 / 30, 169.0 / 120, -3.0 / 10,    7.0 / 240};

// Picks the most-centered admissible window of `len` consecutive open
// nodes along an axis; returns the window start or nullopt.
template <typename Open>
std::optional<int> pick_window(int coord, int limit, int len, const Open& is_open) {
  int best = -1, best_dist = 1 << 30;
  int lo = std::max(0, coord - (len - 1));
  int hi = std::min(coord, limit - len);
  for (int start = lo; start <= hi; ++start) {
    bool ok = true;
    for (int k = 0; k < len; ++k)
      if (!is_open(start + k)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    int pos = coord - start;
    int dist = std::abs(2 * pos - (len - 1));  // prefer centered
    if (dist < best_dist) {
      best_dist = dist;
      best = start;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

template <typename T>
std::optional<T> deriv_x(const DomainGrid& g, const GridField<T>& f, int i, int j, int len,
                         const double table[][6], bool second) {
  if (!g.open(i, j)) return std::nullopt;
  auto start = pick_window(i, g.nx, len, [&](int ii) { return g.open(ii, j); });
  if (!start) return std::nullopt;
  int p = i - *start;
  T acc{};
  for (int k = 0; k < len; ++k) acc += table[p][k] * f.at(*start + k, j);
  double h = g.hx();
  return acc * (second ? 1.0 / (h * h) : 1.0 / h);
}

template <typename T>
std::optional<T> deriv_y(const DomainGrid& g, const GridField<T>& f, int i, int j, int len,
                         const double table[][6], bool second) {
  if (!g.open(i, j)) return std::nullopt;
  auto start = pick_window(j, g.ny, len, [&](int jj) { return g.open(i, jj); });
  if (!start) return std::nullopt;
  int p = j - *start;
  T acc{};
  for (int k = 0; k < len; ++k) acc += table[p][k] * f.at(i, *start + k);
  double h = g.hy();
  return acc * (second ? 1.0 / (h * h) : 1.0 / h);
}

// kD1 rows are 5 wide; present them through a 6-wide shim for the shared
// helper above.
constexpr double kD1pad[5][6] = {
    {kD1[0][0], kD1[0][1], kD1[0][2], kD1[0][3], kD1[0][4], 0},
    {kD1[1][0], kD1[1][1], kD1[1][2], kD1[1][3], kD1[1][4], 0},
    {kD1[2][0], kD1[2][1], kD1[2][2], kD1[2][3], kD1[2][4], 0},
    {kD1[3][0], kD1[3][1], kD1[3][2], kD1[3][3], kD1[3][4], 0},
    {kD1[4][0], kD1[4][1], kD1[4][2], kD1[4][3], kD1[4][4], 0},
};

template <typename T, int R>
std::optional<T> centered_x(const DomainGrid& g, const GridField<T>& f, int i, int j,
                            const double (&w)[2 * R + 1], int order) {
  if (!g.open(i, j) || i < R || i + R >= g.nx) return std::nullopt;
  T acc{};
  for (int k = -R; k <= R; ++k) {
    if (!g.open(i + k, j)) return std::nullopt;
    acc += w[k + R] * f.at(i + k, j);
  }
  return acc * (1.0 / std::pow(g.hx(), order));
}

}  // namespace

std::optional<double> fd_dx(const DomainGrid& g, const GridField<double>& f, int i, int j) {
  return deriv_x(g, f, i, j, 5, kD1pad, false);
}
std::optional<double> fd_dy(const DomainGrid& g, const GridField<double>& f, int i, int j) {
  return deriv_y(g, f, i, j, 5, kD1pad, false);
}
std::optional<double> fd_dxx(const DomainGrid& g, const GridField<double>& f, int i, int j) {
  return deriv_x(g, f, i, j, 6, kD2, true);
}
std::optional<double> fd_dyy(const DomainGrid& g, const GridField<double>& f, int i, int j) {
  return deriv_y(g, f, i, j, 6, kD2, true);
}
std::optional<Complex> fd_dx(const DomainGrid& g, const GridField<Complex>& f, int i, int j) {
  return deriv_x(g, f, i, j, 5, kD1pad, false);
}
std::optional<Complex> fd_dy(const DomainGrid& g, const GridField<Complex>& f, int i, int j) {
  return deriv_y(g, f, i, j, 5, kD1pad, false);
}

std::optional<Complex> fd_dz6(const DomainGrid& g, const GridField<Complex>& f, int i, int j) {
  return centered_x<Complex, 3>(g, f, i, j, kDz6, 1);
}
std::optional<Complex> fd_dzz6(const DomainGrid& g, const GridField<Complex>& f, int i, int j) {
  return centered_x<Complex, 3>(g, f, i, j, kDzz6, 2);
}
std::optional<Complex> fd_dzzz6(const DomainGrid& g, const GridField<Complex>& f, int i, int j) {
  return centered_x<Complex, 4>(g, f, i, j, kDzzz6, 3);
}

}  // namespace bryant4
