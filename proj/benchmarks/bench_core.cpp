#include <benchmark/benchmark.h>

#include "couette/dynamics.hpp"
#include "couette/spectral.hpp"
#include "couette/weights.hpp"
#include "support.hpp"

using namespace couette;

namespace {

SpectralGrid grid_of(const benchmark::State& st) {
  int n = static_cast<int>(st.range(0));
  return SpectralGrid(n, 4 * n);
}

void BM_physical_product(benchmark::State& st) {
  auto g = grid_of(st);
  auto a = testing_support::random_field(g, 1), b = testing_support::random_field(g, 2);
  for (auto _ : st) benchmark::DoNotOptimize(physical_product(a, b));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

void BM_ns_rhs(benchmark::State& st) {
  auto g = grid_of(st);
  auto w = testing_support::random_field(g, 3);
  for (auto _ : st) benchmark::DoNotOptimize(ns_rhs(w, 1.5));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

void BM_weight_table(benchmark::State& st) {
  auto g = grid_of(st);
  WeightParams p;
  p.mu = 1e-3;
  for (auto _ : st) benchmark::DoNotOptimize(WeightTable::build(g, p, WeightModel::NavierStokes, 10.0));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

}  // namespace

BENCHMARK(BM_physical_product)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ns_rhs)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_weight_table)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
