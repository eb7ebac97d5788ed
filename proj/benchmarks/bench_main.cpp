#include <benchmark/benchmark.h>

#include <bit>
#include <vector>

#include "wavelab/corpus.hpp"
#include "wavelab/galerkin.hpp"
#include "wavelab/littlewood_paley.hpp"
#include "wavelab/randomization.hpp"
#include "wavelab/spectral.hpp"

using namespace wavelab;

namespace {

// Args: {dim, N}.
TorusGrid grid_of(const benchmark::State& state) {
  return TorusGrid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
}

void transform_args(benchmark::internal::Benchmark* b) {
  b->Args({1, 256})->Args({1, 4096})->Args({2, 64})->Args({2, 256})->Args({3, 32});
}

void BM_SynthesizeAnalyze(benchmark::State& state) {
  const TorusGrid g = grid_of(state);
  const SpectralField f = power_law_field(g, 1.0, 1.0, true);
  for (auto _ : state) {
    const std::vector<double> x = synthesize(f);
    benchmark::DoNotOptimize(analyze(x, g));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.mode_count()));
}
BENCHMARK(BM_SynthesizeAnalyze)->Apply(transform_args);

void BM_PointwisePower(benchmark::State& state) {
  const TorusGrid g = grid_of(state);
  const SpectralField f = power_law_field(g, 1.2, 0.3, true);
  for (auto _ : state) benchmark::DoNotOptimize(pointwise_power(f, 7.0));
}
BENCHMARK(BM_PointwisePower)->Apply(transform_args);

void BM_GalerkinStep(benchmark::State& state) {
  GalerkinConfig c;
  c.p = 7.0;
  c.grid = grid_of(state);
  // Largest cutoff the solver accepts: 2^{j+1} = N/2.
  c.cutoff_j = std::countr_zero(static_cast<unsigned>(c.grid.modes_per_axis())) - 2;
  const WavePair data{power_law_field(c.grid, 1.3, 0.1, true), power_law_field(c.grid, 0.3, 0.1, true)};
  SplittingIntegrator integ(c, data);
  GalerkinState s{SpectralField(c.grid), SpectralField(c.grid), 0.0};
  for (auto _ : state) integ.step(s, 1e-3);
  benchmark::DoNotOptimize(s.v);
}
BENCHMARK(BM_GalerkinStep)->Args({1, 256})->Args({1, 1024})->Args({2, 64})->Args({3, 32});

void BM_BesovNorm(benchmark::State& state) {
  const TorusGrid g = grid_of(state);
  const SpectralField f = power_law_field(g, 1.0, 1.0, true);
  const NormSpec spec = NormSpec::besov(0.5, 4.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(besov_norm(f, spec));
}
BENCHMARK(BM_BesovNorm)->Apply(transform_args);

void BM_SampleRandomizedPair(benchmark::State& state) {
  const TorusGrid g = grid_of(state);
  const RandomizationSpec spec{{power_law_field(g, 1.2, 1.0, true), power_law_field(g, 0.2, 1.0, true)},
                               CoefficientDistribution::standard(CoefficientFamily::gaussian), 1};
  std::uint64_t m = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_randomized_pair(spec, m++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.mode_count()));
}
BENCHMARK(BM_SampleRandomizedPair)->Apply(transform_args);

}  // namespace

BENCHMARK_MAIN();
