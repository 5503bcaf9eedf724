#include <benchmark/benchmark.h>

#include <random>

#include "bih/reconstruct.hpp"

using namespace bih;
using namespace bih::kernels;

namespace {

VecC rand_c(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  VecC v(n);
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  return v;
}

struct Eig {
  VecR l1, l2;
  PairingTerms p;
  explicit Eig(int K) : l1(K), l2(K) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < K; ++k) l1[k] = 40.0 * (k + 1) * (k + 1), l2[k] = l1[k] + 2.5;
    p = {rand_c(K, rng), rand_c(K, rng), rand_c(K, rng), rand_c(K, rng), rand_c(K, rng), rand_c(K, rng)};
  }
};

template <bool Omp>
void BM_pairings(benchmark::State& st) {
  const int nb = 4 * 64, K = int(st.range(0));
  const MatC G = MatC::Random(2 * nb, K);
  const VecR W = VecR::Constant(2 * nb, 1.0 / 64);
  std::mt19937_64 rng(2);
  const VecC f = rand_c(2 * nb, rng);
  for (auto _ : st) benchmark::DoNotOptimize(Omp ? pairings_omp(G, W, f) : pairings_serial(G, W, f));
}

template <bool Omp>
void BM_combine(benchmark::State& st) {
  const int K = int(st.range(0));
  const MatC X = MatC::Random(63 * 63, K);
  std::mt19937_64 rng(3);
  const VecC c = rand_c(K, rng);
  for (auto _ : st) benchmark::DoNotOptimize(Omp ? combine_omp(X, c) : combine_serial(X, c));
}

template <bool Omp>
void BM_lstar(benchmark::State& st) {
  const Eig e(int(st.range(0)));
  const cplx lam = std::pow(cplx(16, 1), 4);
  for (auto _ : st) benchmark::DoNotOptimize(Omp ? lstar_omp(e.l1, e.l2, e.p, lam) : lstar_serial(e.l1, e.l2, e.p, lam));
}

template <bool Omp>
void BM_lmu(benchmark::State& st) {
  const Eig e(int(st.range(0)));
  const cplx lam = std::pow(cplx(16, 1), 4);
  for (auto _ : st)
    benchmark::DoNotOptimize(Omp ? lmu_omp(e.l1, e.l2, e.p, lam, -1e6) : lmu_serial(e.l1, e.l2, e.p, lam, -1e6));
}

// one reference/target pair over a small lattice; a factorization per tau
void BM_probe_sweep(benchmark::State& st) {
  const Grid g = make_grid(1, 1, int(st.range(0)), int(st.range(0)));
  const auto ref = assemble(g, CoefficientSet());
  const auto tgt = assemble(g, CoefficientSet(nlohmann::json::parse(R"([{"preset":"q_bump","params":{"amp":20}}])")));
  const FourierGrid lat = make_lattice(g, 1);
  const bool par = st.range(1) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(probe_sweep(ref, {&tgt}, lat, {8, 16}, {AmpKind::one}, par));
}

}  // namespace

BENCHMARK(BM_pairings<false>)->Arg(256)->Arg(1024)->Arg(3969);
BENCHMARK(BM_pairings<true>)->Arg(256)->Arg(1024)->Arg(3969);
BENCHMARK(BM_combine<false>)->Arg(256)->Arg(1024);
BENCHMARK(BM_combine<true>)->Arg(256)->Arg(1024);
BENCHMARK(BM_lstar<false>)->Arg(1024)->Arg(16384);
BENCHMARK(BM_lstar<true>)->Arg(1024)->Arg(16384);
BENCHMARK(BM_lmu<false>)->Arg(1024)->Arg(16384);
BENCHMARK(BM_lmu<true>)->Arg(1024)->Arg(16384);
BENCHMARK(BM_probe_sweep)->Args({31, 0})->Args({31, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
