#include "bih/kernels.hpp"

#include <omp.h>

namespace bih::kernels {

namespace {

struct Term {
  cplx t1, t2, t3;
};

inline Term lstar_term(double l1, double l2, const PairingTerms& p, int k, cplx lam) {
  const cplx r1 = 1.0 / (lam - l1), r2 = 1.0 / (lam - l2);
  return {-p.amb[k] * p.c[k] * r1, -p.b[k] * p.cmd[k] * r1, p.b[k] * p.d[k] * (r2 - r1)};
}

inline Term lmu_term(double l1, double l2, const PairingTerms& p, int k, cplx lam, cplx mu) {
  const cplx w1 = (lam - mu) / ((lam - l1) * (mu - l1));
  const cplx w2 = (lam - mu) / ((lam - l2) * (mu - l2));
  return {p.amb[k] * p.c[k] * w1, p.b[k] * p.cmd[k] * w1, p.b[k] * p.d[k] * (w1 - w2)};
}

template <class F>
ThreeSums reduce_serial(int K, F term) {
  ThreeSums s;
  cplx tail = 0;
  const int t0 = K - std::max(1, K / 10);
  for (int k = 0; k < K; ++k) {
    const Term t = term(k);
    s.t1 += t.t1;
    s.t2 += t.t2;
    s.t3 += t.t3;
    if (k >= t0) tail += t.t1 + t.t2 + t.t3;
  }
  s.tail = std::abs(tail);
  return s;
}

template <class F>
ThreeSums reduce_omp(int K, F term) {
  const int t0 = K - std::max(1, K / 10);
  double r1 = 0, i1 = 0, r2 = 0, i2 = 0, r3 = 0, i3 = 0, rt = 0, it = 0;
#pragma omp parallel for reduction(+ : r1, i1, r2, i2, r3, i3, rt, it) schedule(static)
  for (int k = 0; k < K; ++k) {
    const Term t = term(k);
    r1 += t.t1.real();
    i1 += t.t1.imag();
    r2 += t.t2.real();
    i2 += t.t2.imag();
    r3 += t.t3.real();
    i3 += t.t3.imag();
    if (k >= t0) {
      const cplx s = t.t1 + t.t2 + t.t3;
      rt += s.real();
      it += s.imag();
    }
  }
  ThreeSums s;
  s.t1 = {r1, i1};
  s.t2 = {r2, i2};
  s.t3 = {r3, i3};
  s.tail = std::abs(cplx(rt, it));
  return s;
}

}  // namespace

VecC pairings_serial(const MatC& G, const VecR& Wf, const VecC& f) {
  const int K = static_cast<int>(G.cols()), M = static_cast<int>(G.rows());
  VecC p(K);
  for (int k = 0; k < K; ++k) {
    cplx s = 0;
    for (int j = 0; j < M; ++j) s += Wf[j] * f[j] * std::conj(G(j, k));
    p[k] = s;
  }
  return p;
}

VecC pairings_omp(const MatC& G, const VecR& Wf, const VecC& f) {
  const int K = static_cast<int>(G.cols()), M = static_cast<int>(G.rows());
  VecC p(K);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < K; ++k) {
    cplx s = 0;
    for (int j = 0; j < M; ++j) s += Wf[j] * f[j] * std::conj(G(j, k));
    p[k] = s;
  }
  return p;
}

VecC combine_serial(const MatC& X, const VecC& c) {
  VecC out = VecC::Zero(X.rows());
  for (int k = 0; k < X.cols(); ++k) out += c[k] * X.col(k);
  return out;
}

VecC combine_omp(const MatC& X, const VecC& c) {
  const int M = static_cast<int>(X.rows()), K = static_cast<int>(X.cols());
  VecC out(M);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < M; ++j) {
    cplx s = 0;
    for (int k = 0; k < K; ++k) s += c[k] * X(j, k);
    out[j] = s;
  }
  return out;
}

ThreeSums lstar_serial(const VecR& l1, const VecR& l2, const PairingTerms& p, cplx lam) {
  return reduce_serial(static_cast<int>(l1.size()), [&](int k) { return lstar_term(l1[k], l2[k], p, k, lam); });
}

ThreeSums lstar_omp(const VecR& l1, const VecR& l2, const PairingTerms& p, cplx lam) {
  return reduce_omp(static_cast<int>(l1.size()), [&](int k) { return lstar_term(l1[k], l2[k], p, k, lam); });
}

ThreeSums lmu_serial(const VecR& l1, const VecR& l2, const PairingTerms& p, cplx lam, cplx mu) {
  return reduce_serial(static_cast<int>(l1.size()), [&](int k) { return lmu_term(l1[k], l2[k], p, k, lam, mu); });
}

ThreeSums lmu_omp(const VecR& l1, const VecR& l2, const PairingTerms& p, cplx lam, cplx mu) {
  return reduce_omp(static_cast<int>(l1.size()), [&](int k) { return lmu_term(l1[k], l2[k], p, k, lam, mu); });
}

}  // namespace bih::kernels
