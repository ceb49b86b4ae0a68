#include <benchmark/benchmark.h>

#include "scvi/geometry.hpp"
#include "scvi/random.hpp"

using namespace scvi;

namespace {

void prox_bench(benchmark::State& state, const BlockGeometry& g) {
  RandomStream rng(1);
  const Index n = g.set().dim();
  const Vector x = g.to_interior(g.set().sample(rng));
  const Vector y = Vector::NullaryExpr(n, [&] { return rng.normal(); });
  for (auto _ : state) benchmark::DoNotOptimize(prox_map(g, x, y));
  state.SetItemsProcessed(state.iterations());
}

void BM_ProxBox(benchmark::State& state) {
  prox_bench(state, BlockGeometry::euclidean(ComponentSet::unit_box(state.range(0))));
}

void BM_ProxSimplex(benchmark::State& state) {
  prox_bench(state, BlockGeometry::euclidean(ComponentSet::simplex(state.range(0))));
}

void BM_ProxEntropy(benchmark::State& state) { prox_bench(state, BlockGeometry::entropy(state.range(0))); }

}  // namespace

BENCHMARK(BM_ProxBox)->RangeMultiplier(8)->Range(4, 1024);
BENCHMARK(BM_ProxSimplex)->RangeMultiplier(8)->Range(4, 1024);
BENCHMARK(BM_ProxEntropy)->RangeMultiplier(8)->Range(4, 1024);
