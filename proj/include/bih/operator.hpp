#pragma once

#include "bih/coefficients.hpp"
#include "bih/geometry.hpp"

namespace bih {

// Discrete H_{B,q} = (-Delta)^2 - 2i B.grad - i div B + q with clamped conditions.
//
// Afull acts from the extended grid to interior rows. QI lifts an interior field
// with ghost = inner reflection; Qf lifts boundary data (f0, f1) onto the boundary
// ring, ghost ring and corners. A = sym(Afull QI), C = Afull Qf, so the discrete
// BVP (H - lambda) u = 0, gamma_D u = f reads (A - lambda) u = -C f.
struct DiscreteOperator {
  Grid grid;
  CoefficientSet coeffs;
  VecR b1, b2, q;  // samples on the extended grid
  VecR divb;       // closed-form div B, extended grid (probe sources only)
  SpC Afull, QI, Qf;
  SpC A, C;
  SpC T;   // natural one-sided trace on extended fields, 2NB x NE
  SpC NC;  // -h1 h2 W^{-1} C^H
  MatC K;  // boundary consistency block, W-Hermitian
  VecR Wf; // [W, W]
  double bound_M = 0;
  bool collar_equal = true;
  int fo_order = 4;

  int N() const { return grid.N(); }
  int NB() const { return grid.NB(); }
};

DiscreteOperator assemble(const Grid& grid, const CoefficientSet& coeffs);

// (u, d_nu u) from an extended field, ghost-centred normal difference
TracePair dirichlet_trace(const Grid& grid, const VecC& U_ext);
// interior field under the clamped convention, always (0, 0) up to rounding
TracePair dirichlet_trace_clamped(const Grid& grid, const VecC& u);

VecC extend_clamped(const DiscreteOperator& op, const VecC& u);
// QI u + Qf f
VecC extend(const DiscreteOperator& op, const VecC& u, const TracePair& f);
// overwrite the four corner samples with the rule used by Qf
void conform(const Grid& grid, VecC& U_ext);

// gamma_N u = NC u + K f, where f is the Dirichlet data of u
TracePair neumann_trace(const DiscreteOperator& op, const VecC& u, const TracePair& f);
TracePair neumann_trace(const DiscreteOperator& op, const VecC& u);
// one-sided (d_nu Lap U - i B.nu U, -Lap U) on an extended field
TracePair natural_trace(const DiscreteOperator& op, const VecC& U_ext);

// both operators on the same grid and B1 = B2 on the collar (and outside)
bool collar_compatible(const DiscreteOperator& a, const DiscreteOperator& b);

double max_hermitian_defect(const SpC& A);

}  // namespace bih
