#include "bih/bvp.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "bih/kernels.hpp"

namespace bih {

Resolvent::Resolvent(const DiscreteOperator& op, cplx lambda) : op_(&op), lambda_(lambda) {
  SpC Id(op.N(), op.N());
  Id.setIdentity();
  SpC M = op.A - lambda * Id;
  M.makeCompressed();
  lu_.analyzePattern(M);
  lu_.factorize(M);
  if (lu_.info() != Eigen::Success)
    throw SolverError(fmt::format("resolvent: factorization of A - ({}, {}) failed", lambda.real(), lambda.imag()));
}

VecC Resolvent::solve(const VecC& rhs) const {
  VecC x = lu_.solve(rhs);
  if (!x.allFinite()) throw SolverError("resolvent: non-finite solution (lambda too close to the spectrum?)");
  return x;
}

void check_resolvent_set(const EigenData& data, cplx lambda) {
  double d = INFINITY;
  for (int k = 0; k < data.K(); ++k) d = std::min(d, std::abs(lambda - data.lambda[k]));
  if (d < 1e-8 * (1 + std::abs(lambda)))
    throw SolverError(fmt::format("lambda at distance {:.3e} from the computed spectrum", d));
}

BvpSolution solve_direct(const Resolvent& R, const VecC& g, const TracePair& f) {
  const DiscreteOperator& op = R.op();
  if (g.size() != op.N() || f.size() != op.NB()) throw Error(Status::config, "solve_direct: shape mismatch");
  const VecC fs = f.stacked();
  const VecC Cf = op.C * fs;
  const VecC r = op.A * g - R.lambda() * g + Cf;
  BvpSolution s;
  s.lambda = R.lambda();
  s.f = f;
  s.u = g - R.solve(r);
  s.method = "direct";
  const double rn = r.norm();
  const VecC res = op.A * s.u - R.lambda() * s.u + Cf;
  s.residual = rn > 0 ? res.norm() / rn : res.norm();
  if (s.residual > 1e-6)
    throw SolverError(fmt::format("solve_direct: relative residual {:.3e} (near-singular A - lambda)", s.residual));
  s.neumann = TracePair::from_stacked(op.NC * s.u + op.K * fs);
  return s;
}

BvpSolution solve_direct(const Resolvent& R, const VecC& lifting_ext) {
  const Grid& g = R.op().grid;
  return solve_direct(R, interior_of(g, lifting_ext), dirichlet_trace(g, lifting_ext));
}

BvpSolution solve_direct(const DiscreteOperator& op, cplx lambda, const VecC& lifting_ext) {
  const Resolvent R(op, lambda);
  return solve_direct(R, lifting_ext);
}

BvpSolution solve_series(const DiscreteOperator& op, const EigenData& data, cplx lambda, const TracePair& f,
                         int K_trunc, bool parallel) {
  if (K_trunc < 0 || K_trunc > data.K()) throw ConfigError("solve_series: K_trunc out of range");
  check_resolvent_set(data, lambda);
  const VecC fs = f.stacked();
  const MatC G = data.traces.leftCols(K_trunc);
  VecC c = parallel ? kernels::pairings_omp(G, op.Wf, fs) : kernels::pairings_serial(G, op.Wf, fs);
  for (int k = 0; k < K_trunc; ++k) c[k] /= (data.lambda[k] - lambda);
  const MatC P = data.phi.leftCols(K_trunc);
  BvpSolution s;
  s.lambda = lambda;
  s.f = f;
  s.u = parallel ? kernels::combine_omp(P, c) : kernels::combine_serial(P, c);
  s.method = fmt::format("series({})", K_trunc);
  s.neumann = TracePair::from_stacked(op.NC * s.u + op.K * fs);
  return s;
}

VecC blend_lifting(const DiscreteOperator& op, const TracePair& f) {
  const Grid& g = op.grid;
  const double w = g.collar_width;
  auto chi = [&](double d) {
    if (d >= w) return 0.0;
    const double c = std::cos(std::numbers::pi * d / (2 * w));
    return c * c;
  };
  // node order of make_grid: west, east, south, north
  const int n1 = g.n1, n2 = g.n2;
  VecC u = VecC::Zero(g.N());
  for (int i = 1; i <= n1; ++i)
    for (int j = 1; j <= n2; ++j) {
      const double x = g.x(i), y = g.y(j);
      const std::array<std::pair<int, double>, 4> e = {
          {{j - 1, x}, {n2 + j - 1, g.L1 - x}, {2 * n2 + i - 1, y}, {2 * n2 + n1 + i - 1, g.L2 - y}}};
      cplx v = 0;
      for (const auto& [k, d] : e) {
        const double c = chi(d);
        if (c > 0) v += c * (f.c0[k] - d * f.c1[k]);
      }
      u[g.iidx(i, j)] = v;
    }
  return u;
}

TracePair dtn_apply(const Resolvent& R, const TracePair& f) {
  return solve_direct(R, blend_lifting(R.op(), f), f).neumann;
}

TracePair dtn_apply(const DiscreteOperator& op, cplx lambda, const TracePair& f) {
  const Resolvent R(op, lambda);
  return dtn_apply(R, f);
}

TracePair trace_difference_series(const DiscreteOperator& op, const EigenData& data, cplx lambda, cplx mu,
                                  const TracePair& f, bool parallel) {
  check_resolvent_set(data, lambda);
  check_resolvent_set(data, mu);
  const VecC fs = f.stacked();
  VecC c = parallel ? kernels::pairings_omp(data.traces, op.Wf, fs) : kernels::pairings_serial(data.traces, op.Wf, fs);
  for (int k = 0; k < data.K(); ++k) c[k] *= (lambda - mu) / ((lambda - data.lambda[k]) * (mu - data.lambda[k]));
  const VecC t = parallel ? kernels::combine_omp(data.traces, c) : kernels::combine_serial(data.traces, c);
  return TracePair::from_stacked(t);
}

std::vector<ClosenessRow> solution_closeness(const DiscreteOperator& op1, const DiscreteOperator& op2,
                                             const TracePair& f, const std::vector<double>& mus) {
  if (!collar_compatible(op1, op2))
    throw ConfigError("solution_closeness: B1 and B2 differ on the collar");
  std::vector<ClosenessRow> rows;
  const VecC g = blend_lifting(op1, f);
  for (double mu : mus) {
    const Resolvent R1(op1, mu), R2(op2, mu);
    const BvpSolution s1 = solve_direct(R1, g, f), s2 = solve_direct(R2, g, f);
    rows.push_back({mu, volume_norm(op1.grid, s1.u - s2.u), boundary_norm(s1.neumann - s2.neumann, op1.grid)});
  }
  return rows;
}

}  // namespace bih
