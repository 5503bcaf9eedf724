#include <gtest/gtest.h>

#include <random>

#include <omp.h>

#include "bih/kernels.hpp"

using namespace bih;
using namespace bih::kernels;

namespace {

std::mt19937_64 rng(17);

// more threads than cores still splits the reductions
[[maybe_unused]] const int kThreads = (omp_set_num_threads(4), 4);

VecC rand_c(int n) {
  std::normal_distribution<double> nd;
  VecC v(n);
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  return v;
}

PairingTerms rand_terms(int K) {
  return {rand_c(K), rand_c(K), rand_c(K), rand_c(K), rand_c(K), rand_c(K)};
}

VecR ladder(int K, double shift) {
  VecR l(K);
  for (int k = 0; k < K; ++k) l[k] = 50.0 * (k + 1) * (k + 1) + shift;
  return l;
}

}  // namespace

TEST(Kernels, PairingsSerialMatchesOmp) {
  const MatC G = MatC::Random(300, 120);
  VecR W = VecR::Random(300).cwiseAbs();
  const VecC f = rand_c(300);
  const VecC a = pairings_serial(G, W, f), b = pairings_omp(G, W, f);
  EXPECT_LT((a - b).norm(), 1e-13 * a.norm());
  // against a dense product
  const VecC ref = G.adjoint() * W.cast<cplx>().cwiseProduct(f);
  EXPECT_LT((a - ref).norm(), 1e-12 * ref.norm());
}

TEST(Kernels, CombineSerialMatchesOmp) {
  const MatC X = MatC::Random(250, 80);
  const VecC c = rand_c(80);
  const VecC a = combine_serial(X, c), b = combine_omp(X, c);
  EXPECT_LT((a - b).norm(), 1e-13 * a.norm());
  EXPECT_LT((a - X * c).norm(), 1e-12 * a.norm());
}

TEST(Kernels, LstarMatchesDirectSum) {
  const int K = 400;
  const VecR l1 = ladder(K, 0), l2 = ladder(K, 3.5);
  PairingTerms p = rand_terms(K);
  p.a = p.b + p.amb;
  p.c = p.d + p.cmd;
  const cplx lam = std::pow(cplx(12, 1), 4);
  // sum_k a_k c_k / (l1_k - lam) - b_k d_k / (l2_k - lam)
  cplx ref = 0;
  for (int k = 0; k < K; ++k) ref += p.a[k] * p.c[k] / (l1[k] - lam) - p.b[k] * p.d[k] / (l2[k] - lam);
  const ThreeSums s = lstar_serial(l1, l2, p, lam), o = lstar_omp(l1, l2, p, lam);
  EXPECT_LT(std::abs(s.total() - ref), 1e-12 * std::abs(ref));
  EXPECT_LT(std::abs(o.t1 - s.t1) + std::abs(o.t2 - s.t2) + std::abs(o.t3 - s.t3), 1e-12 * std::abs(ref));
  EXPECT_NEAR(o.tail, s.tail, 1e-12 * (1 + s.tail));
}

TEST(Kernels, LmuTendsToLstar) {
  const int K = 200;
  const VecR l1 = ladder(K, 0), l2 = ladder(K, -2);
  const PairingTerms p = rand_terms(K);
  const cplx lam = std::pow(cplx(9, 1), 4);
  const cplx Ls = lstar_serial(l1, l2, p, lam).total();
  double prev = INFINITY;
  for (double mu : {-1e4, -1e6, -1e8, -1e10}) {
    const ThreeSums s = lmu_serial(l1, l2, p, lam, mu), o = lmu_omp(l1, l2, p, lam, mu);
    EXPECT_LT(std::abs(s.total() - o.total()), 1e-12 * std::abs(s.total()));
    const double e = std::abs(s.total() - Ls);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_LT(prev, 1e-5 * std::abs(Ls));
}

TEST(Kernels, EmptyAndSingle) {
  const PairingTerms p = rand_terms(1);
  const ThreeSums s = lstar_serial(ladder(1, 0), ladder(1, 0), p, cplx(3, 1));
  EXPECT_EQ(s.t3, cplx(0));
  EXPECT_EQ(s.tail, std::abs(s.total()));
  const PairingTerms z = rand_terms(0);
  EXPECT_EQ(lstar_omp(VecR(0), VecR(0), z, cplx(3, 1)).total(), cplx(0));
}
