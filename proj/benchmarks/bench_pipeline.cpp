#include <benchmark/benchmark.h>

#include "miscal/experiment.hpp"

namespace {

using namespace miscal;

void BM_RunSnippet(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.seed = 6;
  cfg.scene.n_points = static_cast<int>(state.range(0));
  uint64_t id = 0;
  for (auto _ : state) {
    auto result = run_snippet(cfg, id++);
    benchmark::DoNotOptimize(result);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RunSnippet)->Arg(120)->Arg(500)->Arg(2000)->Complexity();

}  // namespace
