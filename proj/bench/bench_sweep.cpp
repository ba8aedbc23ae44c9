// Serial reference sweep against the OpenMP sweep on the su(2) lattice problem.
// Run with --benchmark_filter=... ; the thread count is the benchmark argument.

#include <benchmark/benchmark.h>

#include "kk/io.hpp"
#include "kk/sweep.hpp"

namespace {

const kk::io::ProblemSpec& problem() {
  static const auto p = kk::io::load_problem(KK_DATA_DIR "/su2_curved.json");
  return p;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto& p = problem();
  kk::sweep::SweepOptions opts;
  for (auto _ : state) {
    auto res = kk::sweep::sweep_serial(*p.algebra, *p.coframe, *p.gauge, p.points, opts);
    benchmark::DoNotOptimize(res);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.points.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto& p = problem();
  kk::sweep::SweepOptions opts;
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto res = kk::sweep::sweep_parallel(*p.algebra, *p.coframe, *p.gauge, p.points, opts, jobs);
    benchmark::DoNotOptimize(res);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.points.size()));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
