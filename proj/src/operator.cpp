#include "bih/operator.hpp"

#include <array>
#include <cmath>
#include <map>

namespace bih {

namespace {

using Trip = Eigen::Triplet<cplx>;

struct Lap5 {
  double a, b;  // 1/h1^2, 1/h2^2
  std::array<std::pair<std::array<int, 2>, double>, 5> at(int i, int j) const {
    return {{{{i, j}, -2 * a - 2 * b}, {{i + 1, j}, a}, {{i - 1, j}, a}, {{i, j + 1}, b}, {{i, j - 1}, b}}};
  }
};

SpC from_trips(int r, int c, const std::vector<Trip>& t) {
  SpC m(r, c);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void sample_coefficients(DiscreteOperator& op) {
  const Grid& g = op.grid;
  op.b1.resize(g.NE());
  op.b2.resize(g.NE());
  op.q.resize(g.NE());
  op.divb.resize(g.NE());
  op.collar_equal = true;
  for (int i = -1; i <= g.n1 + 2; ++i)
    for (int j = -1; j <= g.n2 + 2; ++j) {
      const double x = g.x(i), y = g.y(j);
      const auto p = op.coeffs.eval(x, y);
      if (!std::isfinite(p.b1) || !std::isfinite(p.b2) || !std::isfinite(p.q))
        throw ConfigError("assemble: coefficient samples are not finite real numbers");
      const int e = g.eidx(i, j);
      op.b1[e] = p.b1;
      op.b2[e] = p.b2;
      op.q[e] = p.q;
      op.divb[e] = p.divb;
      const bool outside = i < 1 || i > g.n1 || j < 1 || j > g.n2;
      if (outside || g.in_collar(x, y)) {
        const auto b0 = op.coeffs.eval_background(x, y);
        if (p.b1 != b0.b1 || p.b2 != b0.b2) op.collar_equal = false;
      }
    }

  double M = 0;
  for (int i = 0; i <= g.n1 + 1; ++i)
    for (int j = 0; j <= g.n2 + 1; ++j) {
      const int e = g.eidx(i, j);
      M = std::max({M, std::abs(op.q[e]), std::hypot(op.b1[e], op.b2[e])});
      const int ex = g.eidx(i + 1, j), ey = g.eidx(i, j + 1);
      M = std::max({M, std::abs(op.b1[ex] - op.b1[e]) / g.h1, std::abs(op.b2[ex] - op.b2[e]) / g.h1,
                    std::abs(op.b1[ey] - op.b1[e]) / g.h2, std::abs(op.b2[ey] - op.b2[e]) / g.h2});
    }
  op.bound_M = M;
}

void build_Afull(DiscreteOperator& op) {
  const Grid& g = op.grid;
  const Lap5 L{1 / (g.h1 * g.h1), 1 / (g.h2 * g.h2)};
  std::vector<Trip> t;
  t.reserve(static_cast<size_t>(g.N()) * 34);
  auto B1 = [&](int i, int j) { return op.b1[g.eidx(i, j)]; };
  auto B2 = [&](int i, int j) { return op.b2[g.eidx(i, j)]; };
  const std::array<std::pair<int, double>, 2> fo = {{{1, 8.0 / 12}, {2, -1.0 / 12}}};
  for (int i = 1; i <= g.n1; ++i)
    for (int j = 1; j <= g.n2; ++j) {
      const int r = g.iidx(i, j);
      for (const auto& [p, c] : L.at(i, j))
        for (const auto& [qq, d] : L.at(p[0], p[1])) t.emplace_back(r, g.eidx(qq[0], qq[1]), c * d);
      for (const auto& [m, c] : fo) {
        t.emplace_back(r, g.eidx(i + m, j), -I1 / g.h1 * c * (B1(i, j) + B1(i + m, j)));
        t.emplace_back(r, g.eidx(i - m, j), +I1 / g.h1 * c * (B1(i, j) + B1(i - m, j)));
        t.emplace_back(r, g.eidx(i, j + m), -I1 / g.h2 * c * (B2(i, j) + B2(i, j + m)));
        t.emplace_back(r, g.eidx(i, j - m), +I1 / g.h2 * c * (B2(i, j) + B2(i, j - m)));
      }
      t.emplace_back(r, g.eidx(i, j), op.q[g.eidx(i, j)]);
    }
  op.Afull = from_trips(g.N(), g.NE(), t);
}

struct Corner {
  int ci, cj;
  std::array<std::pair<std::array<int, 2>, double>, 4> from;
};

std::array<Corner, 4> corners(const Grid& g) {
  const int n1 = g.n1, n2 = g.n2;
  return {{
      {0, 0, {{{{0, 1}, 1.0}, {{0, 2}, -0.5}, {{1, 0}, 1.0}, {{2, 0}, -0.5}}}},
      {n1 + 1, 0, {{{{n1 + 1, 1}, 1.0}, {{n1 + 1, 2}, -0.5}, {{n1, 0}, 1.0}, {{n1 - 1, 0}, -0.5}}}},
      {0, n2 + 1, {{{{0, n2}, 1.0}, {{0, n2 - 1}, -0.5}, {{1, n2 + 1}, 1.0}, {{2, n2 + 1}, -0.5}}}},
      {n1 + 1, n2 + 1, {{{{n1 + 1, n2}, 1.0}, {{n1 + 1, n2 - 1}, -0.5}, {{n1, n2 + 1}, 1.0}, {{n1 - 1, n2 + 1}, -0.5}}}},
  }};
}

void build_lifts(DiscreteOperator& op) {
  const Grid& g = op.grid;
  const int NB = g.NB();
  std::vector<Trip> t;
  for (int i = 1; i <= g.n1; ++i)
    for (int j = 1; j <= g.n2; ++j) t.emplace_back(g.eidx(i, j), g.iidx(i, j), 1.0);
  for (const auto& b : g.nodes) t.emplace_back(g.eidx(b.gi, b.gj), g.iidx(b.ii, b.ij), 1.0);
  op.QI = from_trips(g.NE(), g.N(), t);

  t.clear();
  std::map<std::pair<int, int>, int> bmap;
  for (int k = 0; k < NB; ++k) {
    const auto& b = g.nodes[k];
    bmap[{b.bi, b.bj}] = k;
    t.emplace_back(g.eidx(b.bi, b.bj), k, 1.0);
    t.emplace_back(g.eidx(b.gi, b.gj), NB + k, 2 * b.hn);
  }
  for (const auto& c : corners(g))
    for (const auto& [p, w] : c.from) t.emplace_back(g.eidx(c.ci, c.cj), bmap.at({p[0], p[1]}), w);
  op.Qf = from_trips(g.NE(), 2 * NB, t);
}

void build_T(DiscreteOperator& op) {
  const Grid& g = op.grid;
  const int NB = g.NB();
  const Lap5 L{1 / (g.h1 * g.h1), 1 / (g.h2 * g.h2)};
  std::vector<Trip> t;
  for (int k = 0; k < NB; ++k) {
    const auto& b = g.nodes[k];
    for (const auto& [p, c] : L.at(b.bi, b.bj)) {
      t.emplace_back(k, g.eidx(p[0], p[1]), c / b.hn);
      t.emplace_back(NB + k, g.eidx(p[0], p[1]), -c);
    }
    for (const auto& [p, c] : L.at(b.ii, b.ij)) t.emplace_back(k, g.eidx(p[0], p[1]), -c / b.hn);
    const int eb = g.eidx(b.bi, b.bj), ei = g.eidx(b.ii, b.ij);
    const double Bn = 0.5 * ((op.b1[eb] + op.b1[ei]) * b.nx + (op.b2[eb] + op.b2[ei]) * b.ny);
    t.emplace_back(k, eb, -I1 * Bn);
  }
  op.T = from_trips(2 * NB, g.NE(), t);
}

void build_K(DiscreteOperator& op) {
  const Grid& g = op.grid;
  const int NB = g.NB();

  // Taylor extension of the data onto the first two interior rows
  std::vector<Trip> t;
  std::vector<int> cnt(g.N(), 0);
  for (int k = 0; k < NB; ++k) {
    const auto& b = g.nodes[k];
    const int di = b.ii - b.bi, dj = b.ij - b.bj;
    for (int m = 1; m <= 2; ++m) {
      const int p = b.bi + m * di, q = b.bj + m * dj;
      if (p < 1 || p > g.n1 || q < 1 || q > g.n2) continue;
      cnt[g.iidx(p, q)]++;
    }
  }
  for (int k = 0; k < NB; ++k) {
    const auto& b = g.nodes[k];
    const int di = b.ii - b.bi, dj = b.ij - b.bj;
    for (int m = 1; m <= 2; ++m) {
      const int p = b.bi + m * di, q = b.bj + m * dj;
      if (p < 1 || p > g.n1 || q < 1 || q > g.n2) continue;
      const int r = g.iidx(p, q);
      t.emplace_back(r, k, 1.0 / cnt[r]);
      t.emplace_back(r, NB + k, -m * b.hn / cnt[r]);
    }
  }
  const SpC E = from_trips(g.N(), 2 * NB, t);

  const SpC TI = op.T * op.QI;
  const SpC Tf = op.T * op.Qf;
  const SpC R = (TI - op.NC) * E;
  MatC Kraw = MatC(Tf) + MatC(R);
  const VecR W = op.Wf;
  MatC adj = W.cwiseInverse().asDiagonal() * Kraw.adjoint() * W.asDiagonal();
  op.K = 0.5 * (Kraw + adj);
}

}  // namespace

DiscreteOperator assemble(const Grid& grid, const CoefficientSet& coeffs) {
  if (grid.n1 < 8 || grid.n2 < 8) throw ConfigError("assemble: need n >= 8 per axis");
  DiscreteOperator op;
  op.grid = grid;
  op.coeffs = coeffs;
  sample_coefficients(op);
  build_Afull(op);
  build_lifts(op);

  const SpC AQ = op.Afull * op.QI;
  op.A = cplx(0.5) * (AQ + SpC(AQ.adjoint()));
  op.A.makeCompressed();
  op.C = op.Afull * op.Qf;

  const int NB = grid.NB();
  op.Wf.resize(2 * NB);
  for (int k = 0; k < NB; ++k) op.Wf[k] = op.Wf[NB + k] = grid.nodes[k].weight;
  const VecC winv = (-grid.cell() * op.Wf.cwiseInverse()).cast<cplx>();
  op.NC = winv.asDiagonal() * SpC(op.C.adjoint());
  op.NC.makeCompressed();

  build_T(op);
  build_K(op);
  return op;
}

TracePair dirichlet_trace(const Grid& grid, const VecC& U) {
  if (U.size() != grid.NE()) throw Error(Status::config, "dirichlet_trace: expected an extended field");
  TracePair t(grid.NB());
  for (int k = 0; k < grid.NB(); ++k) {
    const auto& b = grid.nodes[k];
    t.c0[k] = U[grid.eidx(b.bi, b.bj)];
    t.c1[k] = (U[grid.eidx(b.gi, b.gj)] - U[grid.eidx(b.ii, b.ij)]) / (2 * b.hn);
  }
  return t;
}

TracePair dirichlet_trace_clamped(const Grid& grid, const VecC& u) {
  if (u.size() != grid.N()) throw Error(Status::config, "dirichlet_trace: expected an interior field");
  VecC U = VecC::Zero(grid.NE());
  for (int i = 1; i <= grid.n1; ++i)
    for (int j = 1; j <= grid.n2; ++j) U[grid.eidx(i, j)] = u[grid.iidx(i, j)];
  for (const auto& b : grid.nodes) U[grid.eidx(b.gi, b.gj)] = u[grid.iidx(b.ii, b.ij)];
  return dirichlet_trace(grid, U);
}

VecC extend_clamped(const DiscreteOperator& op, const VecC& u) { return op.QI * u; }

VecC extend(const DiscreteOperator& op, const VecC& u, const TracePair& f) {
  return op.QI * u + op.Qf * f.stacked();
}

void conform(const Grid& g, VecC& U) {
  for (const auto& c : corners(g)) {
    cplx v = 0;
    for (const auto& [p, w] : c.from) v += w * U[g.eidx(p[0], p[1])];
    U[g.eidx(c.ci, c.cj)] = v;
  }
}

TracePair neumann_trace(const DiscreteOperator& op, const VecC& u, const TracePair& f) {
  if (u.size() != op.N() || f.size() != op.NB()) throw Error(Status::config, "neumann_trace: shape mismatch");
  return TracePair::from_stacked(op.NC * u + op.K * f.stacked());
}

TracePair neumann_trace(const DiscreteOperator& op, const VecC& u) {
  if (u.size() != op.N()) throw Error(Status::config, "neumann_trace: shape mismatch");
  return TracePair::from_stacked(op.NC * u);
}

TracePair natural_trace(const DiscreteOperator& op, const VecC& U) {
  if (U.size() != op.grid.NE()) throw Error(Status::config, "natural_trace: expected an extended field");
  return TracePair::from_stacked(op.T * U);
}

bool collar_compatible(const DiscreteOperator& a, const DiscreteOperator& b) {
  const Grid& g = a.grid;
  if (g.hash() != b.grid.hash()) return false;
  for (int i = -1; i <= g.n1 + 2; ++i)
    for (int j = -1; j <= g.n2 + 2; ++j) {
      const bool outside = i < 1 || i > g.n1 || j < 1 || j > g.n2;
      if (!outside && !g.in_collar(g.x(i), g.y(j))) continue;
      const int e = g.eidx(i, j);
      if (a.b1[e] != b.b1[e] || a.b2[e] != b.b2[e]) return false;
    }
  return true;
}

double max_hermitian_defect(const SpC& A) {
  const SpC D = A - SpC(A.adjoint());
  double m = 0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SpC::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace bih
