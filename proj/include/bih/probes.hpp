#pragma once

#include "bih/bvp.hpp"
#include "bih/kernels.hpp"

namespace bih {

struct ProbeGeometry {
  V2 xi, omega;
  double tau = 0;
  cplx lam;     // tau + i
  double beta;  // sqrt(1 - |xi|^2 / 4 tau^2)
  V2 om1, om2;  // beta omega -/+ xi / 2 tau
  V2C rho1, rho2;
  V2 omt2;  // beta xi - (|xi|^2 / 2 tau) omega
};

// tau >= max(2, <xi>); omega = orientation * perp(xi)/|xi|, or (0,1) when xi = 0
ProbeGeometry make_geometry(const V2& xi, double tau, int orientation = 1);

enum class AmpKind { one, quadratic };
enum class Flavor { lattice, continuum };

const char* to_string(AmpKind k);
AmpKind amp_kind_from(const std::string& s);

// a2 = (v.x)^2 + (c.x)/conj(lam), or 1
struct Amplitude {
  AmpKind kind = AmpKind::one;
  V2C v = V2C::Zero(), c = V2C::Zero();
  cplx lbar = 1;

  cplx value(double x, double y) const;
  V2C grad(double x, double y) const;
  cplx lap() const;
};

// closed-form alpha0 = (omt2.x)^2, alpha1 = i |xi|^2/beta (omega.x)
struct TransportResiduals {
  double r0;  // |T alpha0|
  double r1;  // |T alpha1 + Delta alpha0|
  double r2;  // |Delta alpha1|
  double scale;
};
TransportResiduals transport_residuals(const ProbeGeometry& g, double x, double y);
cplx continuum_a2(const ProbeGeometry& g, double x, double y);

struct ProbePair {
  ProbeGeometry geo;
  Amplitude amp;
  Flavor flavor = Flavor::lattice;
  V2C k1, k2;  // phi1 = e^{i k1.x}, phi2 = e^{i k2.x} a2
  cplx lam4;

  cplx phi1(double x, double y) const;
  cplx phi2(double x, double y) const;
  // sources for an operator with coefficients p at (x, y)
  cplx source(const CoefPoint& p, double x, double y) const;        // Phi
  cplx source_tilde(const CoefPoint& p, double x, double y) const;  // Phi~
  // closed-form gamma_N of phi2 at a boundary node
  std::pair<cplx, cplx> neumann_phi2(double x, double y, double nx, double ny, double Bn) const;
};

ProbePair make_probe(const ProbeGeometry& g, AmpKind kind, Flavor flavor, const Grid& grid);

struct ProbeSamples {
  VecC P1, P2;  // extended grid
  TracePair f1, f2;
};
ProbeSamples sample_probe(const ProbePair& p, const Grid& grid);

// ||(Delta_h^2 - conj(lam4)) phi2|| / ||conj(lam4) phi2|| on interior nodes
double probe_residual(const ProbePair& p, const Grid& grid);
// ||Phi||, ||Phi~|| in the discrete L2 norm
std::pair<double, double> source_norms(const DiscreteOperator& op, const ProbePair& p);

enum class Route { boundary, volume };

struct VolumeTerms {
  cplx first, boundary, third;
  cplx total() const { return first + boundary + third; }
};

cplx pairing_S(const Resolvent& R, const ProbePair& p, const ProbeSamples& s, Route route,
               VolumeTerms* terms = nullptr);

struct PairingDifference {
  cplx boundary, volume;
  double rel_gap;
};

// S1 - S2 by both routes
PairingDifference pairing_difference(const Resolvent& R1, const Resolvent& R2, const ProbePair& p,
                                     const ProbeSamples& s);
// boundary route only, from the two solution fields
cplx pairing_difference_boundary(const Resolvent& R1, const Resolvent& R2, const ProbeSamples& s);

VecR stacked_weights(const Grid& grid);

kernels::PairingTerms pairing_terms(const EigenData& d1, const EigenData& d2, const TracePair& f1,
                                    const TracePair& f2, const Grid& grid, bool parallel = true);

// data2 must already be aligned to data1
kernels::ThreeSums functional_Lstar(const EigenData& d1, const EigenData& d2, const ProbePair& p,
                                    const ProbeSamples& s, const Grid& grid, bool parallel = true);
kernels::ThreeSums functional_L(const EigenData& d1, const EigenData& d2, const ProbePair& p,
                                const ProbeSamples& s, const Grid& grid, double mu, bool parallel = true);

struct IdentityReport {
  cplx S_diff, Lstar;
  double abs_gap, rel_gap;
};

IdentityReport identity_check_528(const Resolvent& R1, const Resolvent& R2, const EigenData& d1,
                                  const EigenData& d2, const ProbePair& p);

}  // namespace bih
