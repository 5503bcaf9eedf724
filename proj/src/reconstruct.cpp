#include "bih/reconstruct.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include <Eigen/SparseCholesky>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace bih {

using std::numbers::pi;

const FourierEntry* FourierGrid::find(int m1, int m2) const {
  for (const auto& e : entries)
    if (e.m1 == m1 && e.m2 == m2) return &e;
  return nullptr;
}

FourierEntry* FourierGrid::find(int m1, int m2) {
  for (auto& e : entries)
    if (e.m1 == m1 && e.m2 == m2) return &e;
  return nullptr;
}

FourierGrid make_lattice(const Grid& grid, int m_max) {
  if (m_max < 0) throw ConfigError("lattice: m_max must be >= 0");
  FourierGrid fg;
  fg.m_max = m_max;
  fg.L1 = grid.L1;
  fg.L2 = grid.L2;
  for (int a = -m_max; a <= m_max; ++a)
    for (int b = -m_max; b <= m_max; ++b) {
      FourierEntry e;
      e.m1 = a;
      e.m2 = b;
      e.xi = V2(2 * pi * a / grid.L1, 2 * pi * b / grid.L2);
      fg.entries.push_back(e);
    }
  return fg;
}

std::vector<std::vector<FourierGrid>> probe_sweep(const DiscreteOperator& ref,
                                                  const std::vector<const DiscreteOperator*>& targets,
                                                  const FourierGrid& lattice, const std::vector<double>& taus,
                                                  const std::vector<AmpKind>& amps, bool parallel) {
  const Grid& grid = ref.grid;
  const int nt = static_cast<int>(targets.size()), na = static_cast<int>(amps.size());
  std::vector<std::vector<FourierGrid>> out(nt, std::vector<FourierGrid>(na, lattice));

  // coefficient-dependent boundary blocks; exactly zero under collar equality
  std::vector<SpC> dNC(nt);
  std::vector<MatC> dK(nt);
  for (int t = 0; t < nt; ++t) {
    if (targets[t]->grid.hash() != grid.hash()) throw ConfigError("probe sweep: operators on different grids");
    dNC[t] = ref.NC - targets[t]->NC;
    dK[t] = ref.K - targets[t]->K;
  }

  for (double tau : taus) {
    const cplx lam4 = std::pow(cplx(tau, 1.0), 4);
    const Resolvent Rref(ref, lam4);
    std::vector<std::unique_ptr<Resolvent>> Rt;
    for (const auto* op : targets) Rt.push_back(std::make_unique<Resolvent>(*op, lam4));

    std::vector<int> idx;
    for (int e = 0; e < static_cast<int>(lattice.entries.size()); ++e) {
      const double nx = lattice.entries[e].xi.norm();
      if (tau >= std::max(2.0, std::sqrt(1 + nx * nx))) idx.push_back(e);
    }
    spdlog::debug("sweep tau = {}: {} admissible frequencies", tau, idx.size());

#pragma omp parallel for if (parallel) schedule(dynamic)
    for (int n = 0; n < static_cast<int>(idx.size()); ++n) {
      const int e = idx[n];
      const ProbeGeometry geo = make_geometry(lattice.entries[e].xi, tau);
      std::vector<ProbePair> pp;
      for (AmpKind a : amps) pp.push_back(make_probe(geo, a, Flavor::lattice, grid));
      const VecC P1 = sample_extended(grid, [&](double x, double y) { return pp[0].phi1(x, y); });
      std::vector<TracePair> f2;
      for (const auto& p : pp)
        f2.push_back(dirichlet_trace(grid, sample_extended(grid, [&](double x, double y) { return p.phi2(x, y); })));
      const BvpSolution sref = solve_direct(Rref, P1);
      const VecC fs = sref.f.stacked();
      for (int t = 0; t < nt; ++t) {
        const BvpSolution st = solve_direct(*Rt[t], P1);
        VecC w = ref.NC * (sref.u - st.u);
        w += dNC[t] * st.u + dK[t] * fs;
        const TracePair wt = TracePair::from_stacked(w);
        for (int a = 0; a < na; ++a)
          out[t][a].entries[e].raw.emplace_back(tau, boundary_inner_product(wt, f2[a], grid));
      }
    }
  }
  return out;
}

Extrapolated richardson(const std::vector<std::pair<double, cplx>>& seq) {
  Extrapolated r{0.0, INFINITY, static_cast<int>(seq.size())};
  if (seq.empty()) return r;
  if (seq.size() == 1) {
    r.value = seq.back().second;
    return r;
  }
  const auto& [tp, vp] = seq[seq.size() - 2];
  const auto& [tl, vl] = seq.back();
  r.value = (tl * vl - tp * vp) / (tl - tp);
  r.residual = std::abs(r.value - vl);
  return r;
}

double confidence_threshold() { return 0.5; }

namespace {

void finish(FourierEntry& e, const Extrapolated& x, cplx factor) {
  e.value = factor * x.value;
  e.residual = std::abs(factor) * x.residual;
  e.confident = x.points >= 2 && e.residual <= confidence_threshold() * std::max(std::abs(e.value), 1e-300);
}

}  // namespace

FourierGrid curl_from_raw(const FourierGrid& raw) {
  FourierGrid fg = raw;
  for (auto& e : fg.entries) {
    const double nx = e.xi.norm();
    if (nx == 0 || e.raw.empty()) {
      e.skipped = true;
      continue;
    }
    std::vector<std::pair<double, cplx>> s;
    for (const auto& [t, v] : e.raw) s.emplace_back(t, v / t);
    finish(e, richardson(s), I1 * nx / 2.0);
  }
  return fg;
}

FourierGrid q_from_raw(const FourierGrid& raw) {
  FourierGrid fg = raw;
  for (auto& e : fg.entries) {
    if (e.raw.empty()) {
      e.skipped = true;
      continue;
    }
    finish(e, richardson(e.raw), 1.0);
  }
  return fg;
}

FourierGrid psi_from_raw(const FourierGrid& raw, const FourierGrid& qhat, const Grid& grid) {
  FourierGrid fg = raw;
  const Synthesis qs = inverse_fourier(qhat, grid);
  for (auto& e : fg.entries) {
    const double nx2 = e.xi.squaredNorm();
    if (nx2 == 0 || e.raw.empty()) {
      e.skipped = true;
      continue;
    }
    // int e^{-i xi.x} q(x) (xi.x)^2 dx with the reconstructed q
    VecC U(grid.NE());
    for (int i = -1; i <= grid.n1 + 2; ++i)
      for (int j = -1; j <= grid.n2 + 2; ++j) {
        const double s = e.xi[0] * grid.x(i) + e.xi[1] * grid.y(j);
        U[grid.eidx(i, j)] = qs.field[grid.eidx(i, j)] * s * s;
      }
    const cplx corr = fourier_transform(grid, U, e.xi);
    Extrapolated x = richardson(e.raw);
    x.value -= corr;
    finish(e, x, 1.0 / (-4.0 * I1 * nx2));
  }
  return fg;
}

FourierGrid recover_curlB(const DiscreteOperator& op1, const DiscreteOperator& op2, int m_max,
                          const std::vector<double>& taus, bool parallel) {
  if (!collar_compatible(op1, op2)) throw ConfigError("recover_curlB: B1 and B2 differ on the collar");
  const auto raw = probe_sweep(op1, {&op2}, make_lattice(op1.grid, m_max), taus, {AmpKind::one}, parallel);
  return curl_from_raw(raw[0][0]);
}

FourierGrid recover_q(const DiscreteOperator& op1, const DiscreteOperator& op2, int m_max,
                      const std::vector<double>& taus, bool parallel) {
  if (!collar_compatible(op1, op2)) throw ConfigError("recover_q: B1 and B2 differ on the collar");
  const auto raw = probe_sweep(op1, {&op2}, make_lattice(op1.grid, m_max), taus, {AmpKind::one}, parallel);
  return q_from_raw(raw[0][0]);
}

FourierGrid recover_psi(const DiscreteOperator& op1, const DiscreteOperator& op2, int m_max,
                        const std::vector<double>& taus, const FourierGrid& qhat, bool parallel) {
  if (!collar_compatible(op1, op2)) throw ConfigError("recover_psi: B1 and B2 differ on the collar");
  const auto raw = probe_sweep(op1, {&op2}, make_lattice(op1.grid, m_max), taus, {AmpKind::quadratic}, parallel);
  return psi_from_raw(raw[0][0], qhat, op1.grid);
}

cplx fourier_transform(const Grid& g, const VecC& U, const V2& xi) {
  cplx s = 0;
  for (int i = 0; i <= g.n1 + 1; ++i) {
    const double wi = (i == 0 || i == g.n1 + 1) ? 0.5 : 1.0;
    for (int j = 0; j <= g.n2 + 1; ++j) {
      const double wj = (j == 0 || j == g.n2 + 1) ? 0.5 : 1.0;
      s += wi * wj * std::exp(-I1 * (xi[0] * g.x(i) + xi[1] * g.y(j))) * U[g.eidx(i, j)];
    }
  }
  return g.cell() * s;
}

Synthesis inverse_fourier(const FourierGrid& fg, const Grid& g) {
  VecC F = VecC::Zero(g.NE());
  const double area = fg.L1 * fg.L2;
  for (const auto& e : fg.entries) {
    if (e.skipped || e.value == cplx(0)) continue;
    for (int i = -1; i <= g.n1 + 2; ++i)
      for (int j = -1; j <= g.n2 + 2; ++j)
        F[g.eidx(i, j)] += e.value * std::exp(I1 * (e.xi[0] * g.x(i) + e.xi[1] * g.y(j))) / area;
  }
  Synthesis s;
  s.field = F.real();
  const double re = F.real().norm(), im = F.imag().norm();
  s.imag_ratio = re > 0 ? im / re : (im > 0 ? INFINITY : 0.0);
  if (s.imag_ratio > 0.05)
    throw Error(Status::tolerance, fmt::format("inverse_fourier: imaginary residual {:.3f} of the field norm", s.imag_ratio));
  return s;
}

HodgeResult hodge_decompose(const VecR& bx, const VecR& by, const Grid& g) {
  if (bx.size() != g.NE() || by.size() != g.NE()) throw Error(Status::config, "hodge: expected extended samples");
  const int N = g.N();
  VecR div(N);
  for (int i = 1; i <= g.n1; ++i)
    for (int j = 1; j <= g.n2; ++j)
      div[g.iidx(i, j)] = (bx[g.eidx(i + 1, j)] - bx[g.eidx(i - 1, j)]) / (2 * g.h1) +
                          (by[g.eidx(i, j + 1)] - by[g.eidx(i, j - 1)]) / (2 * g.h2);
  const double a = 1 / (g.h1 * g.h1), b = 1 / (g.h2 * g.h2);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 1; i <= g.n1; ++i)
    for (int j = 1; j <= g.n2; ++j) {
      const int r = g.iidx(i, j);
      t.emplace_back(r, r, 2 * a + 2 * b);
      if (i > 1) t.emplace_back(r, g.iidx(i - 1, j), -a);
      if (i < g.n1) t.emplace_back(r, g.iidx(i + 1, j), -a);
      if (j > 1) t.emplace_back(r, g.iidx(i, j - 1), -b);
      if (j < g.n2) t.emplace_back(r, g.iidx(i, j + 1), -b);
    }
  Eigen::SparseMatrix<double> L(N, N);  // -Lap_h with psi = 0 on Gamma
  L.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(L);
  if (ldlt.info() != Eigen::Success) throw SolverError("hodge: Poisson factorization failed");
  HodgeResult h;
  h.psi = ldlt.solve(-div);
  const double dn = div.norm();
  const double rn = (L * h.psi + div).norm();
  h.residual = dn > 0 ? rn / dn : rn;
  return h;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw ConfigError("fit_slope: need at least two points");
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

StabilityReport stability_sweep(const Grid& grid, const CoefficientSet& base, const CoefficientSet& pert,
                                const StabilityConfig& cfg, bool parallel) {
  int usable = 0;
  for (double e : cfg.eps) usable += e != 0;
  if (usable < 4) throw ConfigError("stability sweep: need at least 4 nonzero ladder points");

  const DiscreteOperator op1 = assemble(grid, base);
  const EigenData d1 = eigensolve(op1, cfg.K);
  const FourierGrid lattice = make_lattice(grid, cfg.m_max);

  StabilityReport rep;
  rep.rows.resize(cfg.eps.size());
  for (size_t n = 0; n < cfg.eps.size(); ++n) {
    const double eps = cfg.eps[n];
    StabilityRow& row = rep.rows[n];
    row = {};
    row.eps = eps;
    if (eps == 0) continue;
    const CoefficientSet c2 = base.plus(pert, eps);
    const DiscreteOperator op2 = assemble(grid, c2);
    if (!collar_compatible(op1, op2)) throw ConfigError("stability sweep: perturbation touches the collar");
    const EigenData d2 = eigensolve(op2, cfg.K);
    const PairingDefect pd = pairing_defect(d1, d2, grid);
    row.delta_sup = pd.delta_sup;
    row.delta_proxy = pd.delta_proxy;
    row.S_series = pd.S_series;

    // true coefficient differences
    VecC dq(grid.NE());
    double q2 = 0, b2 = 0;
    for (int i = -1; i <= grid.n1 + 2; ++i)
      for (int j = -1; j <= grid.n2 + 2; ++j) {
        const int e = grid.eidx(i, j);
        dq[e] = op2.q[e] - op1.q[e];
        if (i < 1 || i > grid.n1 || j < 1 || j > grid.n2) continue;
        const double db1 = op2.b1[e] - op1.b1[e], db2 = op2.b2[e] - op1.b2[e];
        const double bq = std::abs(dq[e]), bb = std::hypot(db1, db2);
        q2 += bq * bq;
        b2 += bb * bb;
        row.q_Linf = std::max(row.q_Linf, bq);
        row.B_Linf = std::max(row.B_Linf, bb);
      }
    row.q_L2 = std::sqrt(grid.cell() * q2);
    row.B_L2 = std::sqrt(grid.cell() * b2);
    double h = 0;
    for (const auto& e : lattice.entries) h += std::norm(fourier_transform(grid, dq, e.xi)) / (1 + e.xi.squaredNorm());
    row.q_Hm1 = std::sqrt(h);

    if (cfg.recover) {
      const FourierGrid qh = recover_q(op1, op2, cfg.m_max, cfg.taus, parallel);
      for (const auto& e : qh.entries)
        if (!e.skipped) row.qhat_max = std::max(row.qhat_max, std::abs(e.value));
    } else {
      rep.partial = true;
    }
  }

  std::vector<double> lx, lq, lb;
  double cmin = INFINITY;
  for (const auto& r : rep.rows) {
    if (r.eps == 0 || !(r.delta_proxy > 0)) continue;
    lx.push_back(std::log(r.delta_proxy));
    lq.push_back(std::log(std::max(r.q_Linf, 1e-300)));
    lb.push_back(std::log(std::max(r.B_Linf, 1e-300)));
    const double ratio = r.qhat_max / r.delta_proxy;
    rep.C = std::max(rep.C, ratio);
    cmin = std::min(cmin, ratio);
  }
  if (lx.size() < 4) throw ConfigError("stability sweep: fewer than 4 points with positive defect");
  rep.theta1 = fit_slope(lx, lq);
  bool hasB = false;
  for (const auto& r : rep.rows) hasB |= r.B_Linf > 0;
  rep.theta2 = hasB ? fit_slope(lx, lb) : 0.0;
  rep.C_drift = cmin > 0 ? rep.C / cmin : INFINITY;
  return rep;
}

}  // namespace bih
