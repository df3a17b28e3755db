// Microbenchmarks for the kernels that dominate the Monte Carlo loops:
// symmetric eigendecomposition, one matrix-rule replicate, one blockwise
// replicate, and the normalization root solve.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "svshrink/blocks.hpp"
#include "svshrink/estimators.hpp"
#include "svshrink/linalg.hpp"
#include "svshrink/pinsker.hpp"
#include "svshrink/rng.hpp"
#include "svshrink/sequence.hpp"

using namespace svshrink;

namespace {

SymMatrix random_spd(std::size_t p, std::uint64_t seed) {
  GaussianStream g(seed, 1);
  Matrix a(p + 4, p);
  for (std::size_t i = 0; i < p + 4; ++i) {
    for (std::size_t j = 0; j < p; ++j) a(i, j) = g.next();
  }
  return SymMatrix::from_symmetric_parts(transpose(a) * a);
}

void bench_sym_eig(benchmark::State& state) {
  const std::size_t p = static_cast<std::size_t>(state.range(0));
  const SymMatrix s = random_spd(p, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sym_eig(s).values[0]);
  }
}
BENCHMARK(bench_sym_eig)->Arg(3)->Arg(5)->Arg(10);

void bench_svd_thin(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  GaussianStream g(11, 2);
  Matrix x(n, 5);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 5; ++j) x(i, j) = g.next();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(svd_thin(x).singulars[0]);
  }
}
BENCHMARK(bench_svd_thin)->Arg(10)->Arg(100);

void bench_matrix_rule_replicate(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t p = 5;
  GaussianStream g(3, 4);
  Matrix x(n, p);
  for (auto _ : state) {
    state.PauseTiming();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) x(i, j) = g.next();
    }
    x(0, 0) += 20.0;
    state.ResumeTiming();
    benchmark::DoNotOptimize(efron_morris(x, 1.0)(0, 0));
  }
}
BENCHMARK(bench_matrix_rule_replicate)->Arg(10)->Arg(100);

void bench_blockwise_replicate(benchmark::State& state) {
  const double eps = 1.0 / std::sqrt(static_cast<double>(state.range(0)));
  const BlockPartition part = weakly_geometric(eps);
  const EllipsoidSpec spec(1.0, SymMatrix::identity(2));
  const SequenceParam theta = sample_near_boundary(spec, part.n, 5);
  const SequenceParam y = simulate_observation(theta, NoiseLevel(eps), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        blockwise_em(y, NoiseLevel(eps), part).at(1, 0));
  }
}
BENCHMARK(bench_blockwise_replicate)->Arg(400)->Arg(2500)->Arg(10000);

void bench_kappa_solve(benchmark::State& state) {
  const EllipsoidSpec spec(1.0, SymMatrix::diag({5.0, 1.0}));
  const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_kappa_sequence(spec, NoiseLevel(eps)));
  }
}
BENCHMARK(bench_kappa_solve)->Arg(1)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
