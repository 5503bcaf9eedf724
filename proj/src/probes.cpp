#include "bih/probes.hpp"

#include <cmath>

#include <fmt/format.h>

namespace bih {

namespace {

inline cplx dot2(const V2C& a, double x, double y) { return a[0] * x + a[1] * y; }
inline cplx bdot(const V2C& a, const V2C& b) { return a[0] * b[0] + a[1] * b[1]; }

// lattice symbol of -Delta_h and its gradient
cplx sigma_h(const V2C& k, double h1, double h2) {
  const cplx s1 = std::sin(k[0] * h1 / 2.0), s2 = std::sin(k[1] * h2 / 2.0);
  return 4.0 / (h1 * h1) * s1 * s1 + 4.0 / (h2 * h2) * s2 * s2;
}
V2C dsigma_h(const V2C& k, double h1, double h2) {
  return {2.0 / h1 * std::sin(k[0] * h1), 2.0 / h2 * std::sin(k[1] * h2)};
}

// eta with sigma_h(eta -/+ d) = lam^2, d = lam xi / 2 tau
void lattice_wavevectors(const ProbeGeometry& g, double h1, double h2, V2C& k1, V2C& k2m) {
  const cplx lam = g.lam;
  const V2C d = (lam / (2 * g.tau)) * g.xi.cast<cplx>();
  if (g.xi.norm() == 0) {
    // omega = (0,1): one axis carries the whole symbol
    const V2C eta(0.0, 2.0 / h2 * std::asin(lam * h2 / 2.0));
    k1 = eta;
    k2m = eta;
    return;
  }
  V2C eta = lam * g.beta * g.omega.cast<cplx>();
  for (int it = 0; it < 60; ++it) {
    const V2C a = eta - d, b = eta + d;
    Eigen::Vector2cd F(sigma_h(a, h1, h2) - lam * lam, sigma_h(b, h1, h2) - lam * lam);
    Eigen::Matrix2cd J;
    J.row(0) = dsigma_h(a, h1, h2).transpose();
    J.row(1) = dsigma_h(b, h1, h2).transpose();
    const V2C step = J.partialPivLu().solve(F);
    eta -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-14 * std::abs(lam)) break;
  }
  k1 = eta - d;
  k2m = eta + d;
}

// 13-point (Delta_h)^2 of an extended field at interior node (i,j)
cplx bilap_at(const Grid& g, const VecC& U, int i, int j) {
  const double a = 1 / (g.h1 * g.h1), b = 1 / (g.h2 * g.h2);
  auto lap = [&](int p, int q) {
    return a * (U[g.eidx(p + 1, q)] - 2.0 * U[g.eidx(p, q)] + U[g.eidx(p - 1, q)]) +
           b * (U[g.eidx(p, q + 1)] - 2.0 * U[g.eidx(p, q)] + U[g.eidx(p, q - 1)]);
  };
  return a * (lap(i + 1, j) - 2.0 * lap(i, j) + lap(i - 1, j)) + b * (lap(i, j + 1) - 2.0 * lap(i, j) + lap(i, j - 1));
}

CoefPoint coef_at(const DiscreteOperator& op, int e) {
  CoefPoint p;
  p.b1 = op.b1[e];
  p.b2 = op.b2[e];
  p.divb = op.divb[e];
  p.q = op.q[e];
  return p;
}

}  // namespace

ProbeGeometry make_geometry(const V2& xi, double tau, int orientation) {
  const double nx = xi.norm();
  const double tmin = std::max(2.0, std::sqrt(1 + nx * nx));
  if (!(tau >= tmin * (1 - 1e-12)))
    throw ConfigError(fmt::format("make_geometry: tau = {} below max(2, <xi>) = {:.4f}", tau, tmin));
  if (orientation != 1 && orientation != -1) throw ConfigError("make_geometry: orientation must be +-1");
  ProbeGeometry g;
  g.xi = xi;
  g.tau = tau;
  g.omega = nx > 0 ? V2(orientation * V2(-xi[1], xi[0]) / nx) : V2(0, 1);
  g.lam = cplx(tau, 1.0);
  g.beta = std::sqrt(1 - nx * nx / (4 * tau * tau));
  g.om1 = g.beta * g.omega - xi / (2 * tau);
  g.om2 = g.beta * g.omega + xi / (2 * tau);
  g.rho1 = g.lam * g.om1.cast<cplx>();
  g.rho2 = g.lam * g.om2.cast<cplx>();
  g.omt2 = g.beta * xi - (nx * nx / (2 * tau)) * g.omega;
  return g;
}

const char* to_string(AmpKind k) { return k == AmpKind::one ? "one" : "quadratic"; }

AmpKind amp_kind_from(const std::string& s) {
  if (s == "one") return AmpKind::one;
  if (s == "quadratic") return AmpKind::quadratic;
  throw ConfigError("unknown amplitude kind '" + s + "'");
}

cplx Amplitude::value(double x, double y) const {
  if (kind == AmpKind::one) return 1.0;
  const cplx vx = dot2(v, x, y);
  return vx * vx + dot2(c, x, y) / lbar;
}

V2C Amplitude::grad(double x, double y) const {
  if (kind == AmpKind::one) return V2C::Zero();
  return 2.0 * dot2(v, x, y) * v + c / lbar;
}

cplx Amplitude::lap() const { return kind == AmpKind::one ? cplx(0) : 2.0 * bdot(v, v); }

TransportResiduals transport_residuals(const ProbeGeometry& g, double x, double y) {
  const double nx2 = g.xi.squaredNorm();
  const double w = g.omt2.dot(V2(x, y));
  TransportResiduals r;
  r.r0 = std::abs(2.0 * 2.0 * w * g.omt2.dot(g.om2));
  // T alpha1 = 2i om2 . (i |xi|^2/beta omega)
  const double Ta1 = -2.0 * nx2 * g.om2.dot(g.omega) / g.beta;
  r.r1 = std::abs(Ta1 + 2.0 * g.omt2.squaredNorm());
  r.r2 = 0.0;
  r.scale = std::max(1.0, 2.0 * g.omt2.squaredNorm());
  return r;
}

cplx continuum_a2(const ProbeGeometry& g, double x, double y) {
  const double w = g.omt2.dot(V2(x, y));
  const cplx a1 = I1 * g.xi.squaredNorm() / g.beta * g.omega.dot(V2(x, y));
  return w * w + a1 / std::conj(g.lam);
}

cplx ProbePair::phi1(double x, double y) const { return std::exp(I1 * dot2(k1, x, y)); }

cplx ProbePair::phi2(double x, double y) const { return std::exp(I1 * dot2(k2, x, y)) * amp.value(x, y); }

cplx ProbePair::source(const CoefPoint& p, double x, double y) const {
  return phi1(x, y) * (2.0 * (k1[0] * p.b1 + k1[1] * p.b2) - I1 * p.divb + p.q);
}

cplx ProbePair::source_tilde(const CoefPoint& p, double x, double y) const {
  const cplx e = std::exp(I1 * dot2(k2, x, y));
  const V2C ga = amp.grad(x, y);
  return e * (-2.0 * I1 * (p.b1 * ga[0] + p.b2 * ga[1]) +
              (2.0 * (k2[0] * p.b1 + k2[1] * p.b2) - I1 * p.divb + p.q) * amp.value(x, y));
}

std::pair<cplx, cplx> ProbePair::neumann_phi2(double x, double y, double nx, double ny, double Bn) const {
  const cplx e = std::exp(I1 * dot2(k2, x, y));
  const cplx a = amp.value(x, y);
  const V2C ga = amp.grad(x, y);
  const cplx kk = bdot(k2, k2);
  const cplx inner = -kk * a + 2.0 * I1 * bdot(k2, ga) + amp.lap();
  const cplx lap = e * inner;
  V2C grad_kga = V2C::Zero();
  if (amp.kind == AmpKind::quadratic) grad_kga = 2.0 * bdot(k2, amp.v) * amp.v;
  const V2C glap = I1 * k2 * lap + e * (-kk * ga + 2.0 * I1 * grad_kga);
  const cplx dn = nx * glap[0] + ny * glap[1];
  return {dn - I1 * Bn * e * a, -lap};
}

ProbePair make_probe(const ProbeGeometry& g, AmpKind kind, Flavor flavor, const Grid& grid) {
  ProbePair p;
  p.geo = g;
  p.flavor = flavor;
  p.lam4 = std::pow(g.lam, 4);
  V2C k2m;
  if (flavor == Flavor::lattice) {
    lattice_wavevectors(g, grid.h1, grid.h2, p.k1, k2m);
  } else {
    p.k1 = g.rho1;
    k2m = g.rho2;
  }
  p.k2 = k2m.conjugate();
  p.amp.kind = kind;
  p.amp.lbar = std::conj(g.lam);
  if (kind == AmpKind::quadratic) {
    const double nx = g.xi.norm();
    V2C sp, cs;
    if (flavor == Flavor::lattice) {
      const double h[2] = {grid.h1, grid.h2};
      for (int j = 0; j < 2; ++j) {
        sp[j] = 2.0 / h[j] * std::sin(p.k2[j] * h[j]);
        cs[j] = std::cos(p.k2[j] * h[j]);
      }
    } else {
      sp = 2.0 * p.k2;
      cs = V2C(1.0, 1.0);
    }
    const V2C Jsp(-sp[1], sp[0]);
    p.amp.v = -nx * Jsp / (2.0 * p.amp.lbar);
    const cplx spw = sp[0] * g.omega[0] + sp[1] * g.omega[1];
    const cplx gam =
        nx > 0 ? 2.0 * I1 * p.amp.lbar * (cs[0] * p.amp.v[0] * p.amp.v[0] + cs[1] * p.amp.v[1] * p.amp.v[1]) / spw
               : cplx(0);
    p.amp.c = gam * g.omega.cast<cplx>();
  }
  return p;
}

ProbeSamples sample_probe(const ProbePair& p, const Grid& grid) {
  ProbeSamples s;
  s.P1 = sample_extended(grid, [&](double x, double y) { return p.phi1(x, y); });
  s.P2 = sample_extended(grid, [&](double x, double y) { return p.phi2(x, y); });
  s.f1 = dirichlet_trace(grid, s.P1);
  s.f2 = dirichlet_trace(grid, s.P2);
  return s;
}

double probe_residual(const ProbePair& p, const Grid& grid) {
  const VecC P2 = sample_extended(grid, [&](double x, double y) { return p.phi2(x, y); });
  const cplx lb = std::conj(p.lam4);
  double num = 0, den = 0;
  for (int i = 1; i <= grid.n1; ++i)
    for (int j = 1; j <= grid.n2; ++j) {
      const cplx v = P2[grid.eidx(i, j)];
      num += std::norm(bilap_at(grid, P2, i, j) - lb * v);
      den += std::norm(lb * v);
    }
  return std::sqrt(num / den);
}

std::pair<double, double> source_norms(const DiscreteOperator& op, const ProbePair& p) {
  const Grid& g = op.grid;
  double a = 0, b = 0;
  for (int i = 1; i <= g.n1; ++i)
    for (int j = 1; j <= g.n2; ++j) {
      const auto c = coef_at(op, g.eidx(i, j));
      a += std::norm(p.source(c, g.x(i), g.y(j)));
      b += std::norm(p.source_tilde(c, g.x(i), g.y(j)));
    }
  return {std::sqrt(g.cell() * a), std::sqrt(g.cell() * b)};
}

namespace {

VolumeTerms volume_terms(const Resolvent& R, const ProbePair& p, const ProbeSamples& s) {
  const DiscreteOperator& op = R.op();
  const Grid& g = op.grid;
  VecC Phi(g.N()), Phit(g.N()), P1(g.N());
  for (int i = 1; i <= g.n1; ++i)
    for (int j = 1; j <= g.n2; ++j) {
      const int e = g.eidx(i, j), r = g.iidx(i, j);
      const auto c = coef_at(op, e);
      Phi[r] = p.source(c, g.x(i), g.y(j));
      Phit[r] = p.source_tilde(c, g.x(i), g.y(j));
      P1[r] = s.P1[e];
    }
  TracePair gn2(g.NB());
  for (int k = 0; k < g.NB(); ++k) {
    const auto& b = g.nodes[k];
    const int eb = g.eidx(b.bi, b.bj), ei = g.eidx(b.ii, b.ij);
    const double Bn = 0.5 * ((op.b1[eb] + op.b1[ei]) * b.nx + (op.b2[eb] + op.b2[ei]) * b.ny);
    const auto [n0, n1] = p.neumann_phi2(g.x(b.bi), g.y(b.bj), b.nx, b.ny, Bn);
    gn2.c0[k] = n0;
    gn2.c1[k] = n1;
  }
  VolumeTerms t;
  t.first = -volume_inner_product(g, P1, Phit);
  t.boundary = boundary_inner_product(s.f1, gn2, g);
  t.third = volume_inner_product(g, R.solve(Phi), Phit);
  return t;
}

}  // namespace

cplx pairing_S(const Resolvent& R, const ProbePair& p, const ProbeSamples& s, Route route, VolumeTerms* terms) {
  if (route == Route::boundary) {
    const BvpSolution sol = solve_direct(R, s.P1);
    return boundary_inner_product(sol.neumann, s.f2, R.op().grid);
  }
  const VolumeTerms t = volume_terms(R, p, s);
  if (terms) *terms = t;
  return t.total();
}

cplx pairing_difference_boundary(const Resolvent& R1, const Resolvent& R2, const ProbeSamples& s) {
  const DiscreteOperator &o1 = R1.op(), &o2 = R2.op();
  const BvpSolution a = solve_direct(R1, s.P1), b = solve_direct(R2, s.P1);
  const VecC fs = s.f1.stacked();
  // difference first: the K f part is large and cancels under collar equality
  VecC w = o1.NC * (a.u - b.u);
  w += SpC(o1.NC - o2.NC) * b.u + (o1.K - o2.K) * fs;
  return boundary_inner_product(TracePair::from_stacked(w), s.f2, o1.grid);
}

PairingDifference pairing_difference(const Resolvent& R1, const Resolvent& R2, const ProbePair& p,
                                     const ProbeSamples& s) {
  PairingDifference d;
  d.boundary = pairing_difference_boundary(R1, R2, s);
  const VolumeTerms a = volume_terms(R1, p, s), b = volume_terms(R2, p, s);
  d.volume = (a.first - b.first) + (a.boundary - b.boundary) + (a.third - b.third);
  const double den = std::abs(d.boundary);
  d.rel_gap = den > 0 ? std::abs(d.boundary - d.volume) / den : std::abs(d.volume);
  return d;
}

VecR stacked_weights(const Grid& grid) {
  const int NB = grid.NB();
  VecR w(2 * NB);
  for (int k = 0; k < NB; ++k) w[k] = w[NB + k] = grid.nodes[k].weight;
  return w;
}

kernels::PairingTerms pairing_terms(const EigenData& d1, const EigenData& d2, const TracePair& f1,
                                    const TracePair& f2, const Grid& grid, bool parallel) {
  if (d1.K() != d2.K()) throw ConfigError("pairing terms: mismatched K");
  const VecR W = stacked_weights(grid);
  const VecC a1 = f1.stacked(), a2 = f2.stacked();
  const MatC D = d1.traces - d2.traces;
  auto pr = [&](const MatC& G, const VecC& f) {
    return parallel ? kernels::pairings_omp(G, W, f) : kernels::pairings_serial(G, W, f);
  };
  kernels::PairingTerms t;
  t.a = pr(d1.traces, a1);
  t.b = pr(d2.traces, a1);
  t.c = pr(d1.traces, a2).conjugate();
  t.d = pr(d2.traces, a2).conjugate();
  t.amb = pr(D, a1);
  t.cmd = pr(D, a2).conjugate();
  return t;
}

kernels::ThreeSums functional_Lstar(const EigenData& d1, const EigenData& d2, const ProbePair& p,
                                    const ProbeSamples& s, const Grid& grid, bool parallel) {
  const auto t = pairing_terms(d1, d2, s.f1, s.f2, grid, parallel);
  return parallel ? kernels::lstar_omp(d1.lambda, d2.lambda, t, p.lam4)
                  : kernels::lstar_serial(d1.lambda, d2.lambda, t, p.lam4);
}

kernels::ThreeSums functional_L(const EigenData& d1, const EigenData& d2, const ProbePair& p,
                                const ProbeSamples& s, const Grid& grid, double mu, bool parallel) {
  const double floor = std::min(d1.lambda.minCoeff(), d2.lambda.minCoeff());
  if (!(mu <= floor - 1)) throw ConfigError(fmt::format("functional_L: mu = {} not below the spectra by 1", mu));
  const auto t = pairing_terms(d1, d2, s.f1, s.f2, grid, parallel);
  return parallel ? kernels::lmu_omp(d1.lambda, d2.lambda, t, p.lam4, mu)
                  : kernels::lmu_serial(d1.lambda, d2.lambda, t, p.lam4, mu);
}

IdentityReport identity_check_528(const Resolvent& R1, const Resolvent& R2, const EigenData& d1,
                                  const EigenData& d2, const ProbePair& p) {
  const Grid& g = R1.op().grid;
  if (!collar_compatible(R1.op(), R2.op())) throw ConfigError("identity check: B1 and B2 differ on the collar");
  const ProbeSamples s = sample_probe(p, g);
  IdentityReport r;
  r.S_diff = pairing_difference_boundary(R1, R2, s);
  r.Lstar = functional_Lstar(d1, align(d1, d2, g), p, s, g).total();
  r.abs_gap = std::abs(r.S_diff - r.Lstar);
  const double den = std::abs(r.S_diff);
  r.rel_gap = den > 0 ? r.abs_gap / den : r.abs_gap;
  return r;
}

}  // namespace bih
