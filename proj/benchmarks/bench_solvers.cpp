#include <benchmark/benchmark.h>

#include "scvi/gap.hpp"
#include "scvi/generators.hpp"
#include "scvi/solvers.hpp"

using namespace scvi;

namespace {

ScviProblem bench_problem(std::size_t blocks) {
  StronglyMonotoneAffineParams p;
  p.blocks = blocks;
  p.block_size = 4;
  return make_strongly_monotone_affine(p);
}

void BM_BsmpIterations(benchmark::State& state) {
  const auto pr = bench_problem(static_cast<std::size_t>(state.range(0)));
  BsmpConfig cfg;
  cfg.iterations = 10000;
  cfg.schedule = StepsizeSchedule::harmonic(auto_gamma0(pr, RateRegime::StronglyPseudoMonotone));
  cfg.checkpoints.geometric = false;
  cfg.checkpoints.linear_count = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_bsmp(pr, cfg));
  state.SetItemsProcessed(state.iterations() * 10000);
}

void BM_SmpIterations(benchmark::State& state) {
  const auto pr = bench_problem(static_cast<std::size_t>(state.range(0)));
  SmpConfig cfg;
  cfg.iterations = 2000;
  cfg.checkpoints.geometric = false;
  cfg.checkpoints.linear_count = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_smp(pr, cfg));
  state.SetItemsProcessed(state.iterations() * 2000);
}

void BM_AffineExactGap(benchmark::State& state) {
  MonotoneAffineParams p;
  p.blocks = static_cast<std::size_t>(state.range(0));
  const auto pr = make_monotone_affine(p);
  RandomStream rng(3);
  const auto x = pr.sample_point(rng);
  for (auto _ : state) benchmark::DoNotOptimize(gap_function(pr, x, AffineExact{}));
}

}  // namespace

BENCHMARK(BM_BsmpIterations)->Arg(4)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmpIterations)->Arg(4)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AffineExactGap)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
