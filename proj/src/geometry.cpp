#include "bih/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace bih {

bool Grid::in_collar(double px, double py) const {
  const double d = std::min({px, L1 - px, py, L2 - py});
  return d <= collar_width;
}

std::string Grid::hash() const {
  return fmt::format("grid:{:.17g}:{:.17g}:{}:{}:{:.17g}", L1, L2, n1, n2, collar_width);
}

Grid make_grid(double L1, double L2, int n1, int n2, double w) {
  if (!(L1 > 0) || !(L2 > 0)) throw ConfigError("grid: side lengths must be positive");
  if (n1 < 8 || n2 < 8) throw ConfigError("grid: need at least 8 interior nodes per axis");
  if (!(w > 0) || !(w < std::min(L1, L2) / 4)) throw ConfigError("grid: collar width out of range");

  Grid g;
  g.L1 = L1;
  g.L2 = L2;
  g.n1 = n1;
  g.n2 = n2;
  g.h1 = L1 / (n1 + 1);
  g.h2 = L2 / (n2 + 1);
  g.collar_width = w;

  // west, east, south, north; corners are not nodes
  auto push = [&](int bi, int bj, int nx, int ny) {
    BoundaryNode b{};
    b.bi = bi;
    b.bj = bj;
    b.ii = bi - nx;
    b.ij = bj - ny;
    b.gi = bi + nx;
    b.gj = bj + ny;
    b.nx = nx;
    b.ny = ny;
    b.hn = nx != 0 ? g.h1 : g.h2;
    const double ht = nx != 0 ? g.h2 : g.h1;
    const bool end = nx != 0 ? (bj == 1 || bj == n2) : (bi == 1 || bi == n1);
    // the corner half-cell is folded onto its neighbour so each edge sums to its length
    b.weight = end ? 1.5 * ht : ht;
    g.nodes.push_back(b);
  };
  for (int j = 1; j <= n2; ++j) push(0, j, -1, 0);
  for (int j = 1; j <= n2; ++j) push(n1 + 1, j, 1, 0);
  for (int i = 1; i <= n1; ++i) push(i, 0, 0, -1);
  for (int i = 1; i <= n1; ++i) push(i, n2 + 1, 0, 1);

  g.collar.assign(g.N(), 0);
  for (int i = 1; i <= n1; ++i)
    for (int j = 1; j <= n2; ++j) g.collar[g.iidx(i, j)] = g.in_collar(g.x(i), g.y(j)) ? 1 : 0;
  return g;
}

Grid make_grid(double L1, double L2, int n1, int n2) {
  return make_grid(L1, L2, n1, n2, 0.15 * std::min(L1, L2));
}

cplx boundary_inner_product(const TracePair& f, const TracePair& g, const Grid& grid) {
  if (f.size() != grid.NB() || g.size() != grid.NB())
    throw Error(Status::config, "boundary_inner_product: node count mismatch");
  cplx s = 0;
  for (int k = 0; k < grid.NB(); ++k)
    s += grid.nodes[k].weight * (f.c0[k] * std::conj(g.c0[k]) + f.c1[k] * std::conj(g.c1[k]));
  return s;
}

double boundary_norm(const TracePair& f, const Grid& grid) {
  return std::sqrt(std::max(0.0, boundary_inner_product(f, f, grid).real()));
}

cplx volume_inner_product(const Grid& grid, const VecC& a, const VecC& b) {
  return grid.cell() * b.dot(a);  // Eigen dot conjugates its first argument
}

double volume_norm(const Grid& grid, const VecC& a) {
  return std::sqrt(grid.cell()) * a.norm();
}

VecC sample_extended(const Grid& grid, const ScalarFn& f) {
  VecC u(grid.NE());
  for (int i = -1; i <= grid.n1 + 2; ++i)
    for (int j = -1; j <= grid.n2 + 2; ++j) u[grid.eidx(i, j)] = f(grid.x(i), grid.y(j));
  return u;
}

VecC sample_interior(const Grid& grid, const ScalarFn& f) {
  VecC u(grid.N());
  for (int i = 1; i <= grid.n1; ++i)
    for (int j = 1; j <= grid.n2; ++j) u[grid.iidx(i, j)] = f(grid.x(i), grid.y(j));
  return u;
}

TracePair sample_boundary(const Grid& grid, const ScalarFn& f0, const ScalarFn& f1) {
  TracePair t(grid.NB());
  for (int k = 0; k < grid.NB(); ++k) {
    const auto& b = grid.nodes[k];
    t.c0[k] = f0(grid.x(b.bi), grid.y(b.bj));
    t.c1[k] = f1(grid.x(b.bi), grid.y(b.bj));
  }
  return t;
}

VecC interior_of(const Grid& grid, const VecC& ext) {
  VecC u(grid.N());
  for (int i = 1; i <= grid.n1; ++i)
    for (int j = 1; j <= grid.n2; ++j) u[grid.iidx(i, j)] = ext[grid.eidx(i, j)];
  return u;
}

}  // namespace bih
