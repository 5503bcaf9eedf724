#pragma once

#include <string>
#include <vector>

#include "bih/probes.hpp"

namespace bih {

struct FourierEntry {
  int m1 = 0, m2 = 0;
  V2 xi = V2::Zero();
  cplx value = 0;
  std::vector<std::pair<double, cplx>> raw;  // (tau, raw sequence value)
  double residual = 0;                       // |last two raw values apart|, scaled like value
  bool confident = false;
  bool skipped = false;
};

// xi = 2 pi (m1/L1, m2/L2), |m_i| <= m_max
struct FourierGrid {
  int m_max = 0;
  double L1 = 1, L2 = 1;
  std::vector<FourierEntry> entries;

  const FourierEntry* find(int m1, int m2) const;
  FourierEntry* find(int m1, int m2);
};

FourierGrid make_lattice(const Grid& grid, int m_max);

// Raw S1 - S2 over the lattice and tau schedule for several second operators against
// one reference operator. One factorization per (operator, tau) is shared by all xi.
// Result index: [target][amplitude] -> lattice with raw filled.
std::vector<std::vector<FourierGrid>> probe_sweep(const DiscreteOperator& ref,
                                                  const std::vector<const DiscreteOperator*>& targets,
                                                  const FourierGrid& lattice, const std::vector<double>& taus,
                                                  const std::vector<AmpKind>& amps, bool parallel = true);

// two-point extrapolation in 1/tau over the last two admissible taus
struct Extrapolated {
  cplx value;
  double residual;
  int points;
};
Extrapolated richardson(const std::vector<std::pair<double, cplx>>& seq);

double confidence_threshold();  // residual / |value| above this marks an entry low-confidence

// post-processing of raw sweeps
FourierGrid curl_from_raw(const FourierGrid& raw_one);
FourierGrid q_from_raw(const FourierGrid& raw_one);
FourierGrid psi_from_raw(const FourierGrid& raw_quadratic, const FourierGrid& qhat, const Grid& grid);

// full recoveries from the two operators (op1 is the reference, B = B2 - B1, q = q2 - q1)
FourierGrid recover_curlB(const DiscreteOperator& op1, const DiscreteOperator& op2, int m_max,
                          const std::vector<double>& taus, bool parallel = true);
FourierGrid recover_q(const DiscreteOperator& op1, const DiscreteOperator& op2, int m_max,
                      const std::vector<double>& taus, bool parallel = true);
FourierGrid recover_psi(const DiscreteOperator& op1, const DiscreteOperator& op2, int m_max,
                        const std::vector<double>& taus, const FourierGrid& qhat, bool parallel = true);

// trapezoid transform int e^{-i xi.x} U dx over the closed rectangle; U extended-grid samples
cplx fourier_transform(const Grid& grid, const VecC& U_ext, const V2& xi);

struct Synthesis {
  VecR field;  // extended grid samples
  double imag_ratio;
};
Synthesis inverse_fourier(const FourierGrid& fg, const Grid& grid);

struct HodgeResult {
  VecR psi;  // interior
  double residual;  // ||Lap_h psi - div_h B|| / ||div_h B||
};
// B components sampled on the extended grid
HodgeResult hodge_decompose(const VecR& bx, const VecR& by, const Grid& grid);

struct StabilityRow {
  double eps;
  double delta_sup, delta_proxy, S_series;
  double q_L2, q_Linf, q_Hm1;
  double B_L2, B_Linf;
  double qhat_max;  // max_xi |recovered q^(xi)|
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  double theta1 = 0;  // slope of log ||q1-q2||_inf vs log delta_proxy
  double theta2 = 0;  // slope of log ||B1-B2||_inf vs log delta_proxy
  double C = 0;       // max over the ladder of qhat_max / delta_proxy
  double C_drift = 0; // max / min of that ratio
  bool partial = false;
};

struct StabilityConfig {
  std::vector<double> eps;
  int K = 100;
  int m_max = 1;
  std::vector<double> taus = {8, 16};
  bool recover = true;
};

StabilityReport stability_sweep(const Grid& grid, const CoefficientSet& base, const CoefficientSet& perturbation,
                                const StabilityConfig& cfg, bool parallel = true);

double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bih
