#pragma once

#include "bih/types.hpp"

// Hot reductions over eigenpairs. Each OpenMP kernel has a serial twin that the
// tests use as the reference.
namespace bih::kernels {

// p_k = <f, g_k> = sum_j W_j f_j conj(G_jk)
VecC pairings_serial(const MatC& G, const VecR& Wf, const VecC& f);
VecC pairings_omp(const MatC& G, const VecR& Wf, const VecC& f);

// sum_k c_k X_k
VecC combine_serial(const MatC& X, const VecC& c);
VecC combine_omp(const MatC& X, const VecC& c);

// Inputs per k: a = <f1, g1k>, b = <f1, g2k>, c = <g1k, f2>, d = <g2k, f2>,
// amb = <f1, g1k - g2k>, cmd = <g1k - g2k, f2>.
struct PairingTerms {
  VecC a, b, c, d, amb, cmd;
};

struct ThreeSums {
  cplx t1 = 0, t2 = 0, t3 = 0;
  double tail = 0;  // |sum of the last tenth of the terms|
  cplx total() const { return t1 + t2 + t3; }
};

ThreeSums lstar_serial(const VecR& l1, const VecR& l2, const PairingTerms& p, cplx lam);
ThreeSums lstar_omp(const VecR& l1, const VecR& l2, const PairingTerms& p, cplx lam);

ThreeSums lmu_serial(const VecR& l1, const VecR& l2, const PairingTerms& p, cplx lam, cplx mu);
ThreeSums lmu_omp(const VecR& l1, const VecR& l2, const PairingTerms& p, cplx lam, cplx mu);

}  // namespace bih::kernels
