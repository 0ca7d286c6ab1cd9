#include <benchmark/benchmark.h>

#include "miscal/estimator.hpp"
#include "miscal/scene.hpp"

namespace {

using namespace miscal;

std::vector<Correspondence> bench_pairs(int n_points, double noise_px) {
  SceneConfig cfg;
  cfg.n_points = n_points;
  Rng scene_rng(1);
  const SyntheticScene scene = generate_scene(cfg, scene_rng);
  Rng noise_rng(2);
  return make_correspondences(scene, CameraIntrinsics::reference(), {0.3, -0.5, 0.9},
                              noise_px, noise_rng);
}

void BM_SolveSmallAngle(benchmark::State& state) {
  const auto cs = bench_pairs(static_cast<int>(state.range(0)), 2.0);
  const EstimatorConfig cfg;
  for (auto _ : state) {
    auto est = solve_small_angle(build_linear_system(cs), cfg);
    benchmark::DoNotOptimize(est);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveSmallAngle)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_EstimateFrame(benchmark::State& state) {
  const auto cs = bench_pairs(static_cast<int>(state.range(0)), 2.0);
  const EstimatorConfig cfg;
  for (auto _ : state) {
    auto est = estimate_frame(cs, cfg);
    benchmark::DoNotOptimize(est);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EstimateFrame)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

}  // namespace
