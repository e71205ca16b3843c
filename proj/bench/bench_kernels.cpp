// Serial reference vs OpenMP path of the batch kernels. Arg 0 is serial,
// arg 1 parallel; results are identical by construction.

#include <benchmark/benchmark.h>

#include "hodgekit/kernels.hpp"
#include "hodgekit/monodromy.hpp"
#include "hodgekit/sampling.hpp"

using namespace hodge;

namespace {

const Context& weight2() {
  static const Context c = build_context(HodgeNumbers(2, {1, 2, 1}));
  return c;
}

void BM_density(benchmark::State& st) {
  const Context ctx = build_context(HodgeNumbers(1, {1, 1}));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::density_probe(ctx, 10000, 42, st.range(0)).fraction);
  st.SetItemsProcessed(st.iterations() * 10000);
}

void BM_membership_sweep(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::membership_sweep(weight2(), 1000, 4, st.range(0)).agree);
  st.SetItemsProcessed(st.iterations() * 1000);
}

void BM_transversality_batch(benchmark::State& st) {
  const Context ctx = build_context(HodgeNumbers(3, {1, 1, 1, 1}));
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::transversality_batch(ctx, 100, 10, 3, 1.0, 2024, st.range(0)).max_residual);
}

void BM_psi_grid(benchmark::State& st) {
  const Context& ctx = weight2();
  CounterRng rng(8);
  const HorizontalFamily fam = HorizontalFamily::abelian(ctx, sampling::abelian_generators(ctx, 2, rng), 0.9);
  const AbelianSubalgebra a = tangent_subalgebra(ctx, fam);
  const auto grid = polydisc_grid(2, 0.9, 5);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::psi_grid(ctx, a, fam, grid, st.range(0)).size());
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid.size()));
}

void BM_serre_sweep(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serre_sweep_2x2(30, 3, 12, st.range(0)).elements);
}

}  // namespace

BENCHMARK(BM_density)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_membership_sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_transversality_batch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_psi_grid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_serre_sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
