#include <benchmark/benchmark.h>

#include "khl/distribution.hpp"
#include "khl/explore.hpp"
#include "khl/schur.hpp"
#include "khl/verify.hpp"

using namespace khl;

static void BM_BuildDistribution(benchmark::State& state) {
  const auto a = sample_vector(SampleStrategy::kSimplex, static_cast<int>(state.range(0)),
                               1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_distribution(a));
  }
}
BENCHMARK(BM_BuildDistribution)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

static void BM_AbsoluteMoment(benchmark::State& state) {
  const auto d = build_distribution(
      sample_vector(SampleStrategy::kSimplex, static_cast<int>(state.range(0)), 1, 0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(absolute_moment(d, 3.5));
  }
}
BENCHMARK(BM_AbsoluteMoment)->Arg(12)->Arg(16)->Arg(20);

static void BM_MixedMoment(benchmark::State& state) {
  const auto d = build_distribution(
      sample_vector(SampleStrategy::kSimplex, static_cast<int>(state.range(0)), 1, 0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mixed_abs_moment(d, 0.5, 3.0));
  }
}
BENCHMARK(BM_MixedMoment)->Arg(6)->Arg(10);

static void BM_DiagonalMomentLogSpace(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(diagonal_moment(state.range(0), 3.0));
  }
}
BENCHMARK(BM_DiagonalMomentLogSpace)->Arg(64)->Arg(1024)->Arg(4096);

static void BM_Diagonalize(benchmark::State& state) {
  const auto sq = SquaresVector::from_coefficients(
      sample_vector(SampleStrategy::kSimplex, static_cast<int>(state.range(0)), 2, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(diagonalize(sq));
  }
}
BENCHMARK(BM_Diagonalize)->Arg(10)->Arg(20);

static void BM_VerifyGauss(benchmark::State& state) {
  const auto a = sample_vector(SampleStrategy::kSimplex, 10, 3, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_gauss_stability(a, 3.0));
  }
}
BENCHMARK(BM_VerifyGauss);

BENCHMARK_MAIN();
