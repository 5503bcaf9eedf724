#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bih/types.hpp"

namespace bih {

// One boundary grid point. Index triple along the inward normal line:
// boundary node (bi,bj), first interior node (ii,ij), ghost node (gi,gj).
struct BoundaryNode {
  int bi, bj;
  int ii, ij;
  int gi, gj;
  int nx, ny;     // outward normal, axis aligned
  double hn;      // spacing along the normal
  double weight;  // quadrature weight (length)
};

// Uniform tensor grid on [0,L1]x[0,L2]. Interior nodes are i=1..n1, j=1..n2.
// The extended grid adds the boundary ring and one ghost ring: i=-1..n1+2.
struct Grid {
  double L1 = 1, L2 = 1;
  int n1 = 0, n2 = 0;
  double h1 = 0, h2 = 0;
  double collar_width = 0;
  std::vector<BoundaryNode> nodes;
  std::vector<char> collar;  // per interior flat index

  int N() const { return n1 * n2; }
  int NB() const { return static_cast<int>(nodes.size()); }
  int E1() const { return n1 + 4; }
  int E2() const { return n2 + 4; }
  int NE() const { return E1() * E2(); }
  int iidx(int i, int j) const { return (i - 1) * n2 + (j - 1); }
  int eidx(int i, int j) const { return (i + 1) * E2() + (j + 1); }
  double x(int i) const { return i * h1; }
  double y(int j) const { return j * h2; }
  double cell() const { return h1 * h2; }
  bool in_collar(double px, double py) const;
  std::string hash() const;
};

Grid make_grid(double L1, double L2, int n1, int n2, double w);
Grid make_grid(double L1, double L2, int n1, int n2);  // w = 0.15 min(L1,L2)

// <f,g> = sum_nodes w (f0 conj g0 + f1 conj g1)
cplx boundary_inner_product(const TracePair& f, const TracePair& g, const Grid& grid);
double boundary_norm(const TracePair& f, const Grid& grid);

// (a,b) = h1 h2 sum a conj b over interior nodes
cplx volume_inner_product(const Grid& grid, const VecC& a, const VecC& b);
double volume_norm(const Grid& grid, const VecC& a);

using ScalarFn = std::function<cplx(double, double)>;

VecC sample_extended(const Grid& grid, const ScalarFn& f);
VecC sample_interior(const Grid& grid, const ScalarFn& f);
TracePair sample_boundary(const Grid& grid, const ScalarFn& f0, const ScalarFn& f1);
VecC interior_of(const Grid& grid, const VecC& ext);

}  // namespace bih
