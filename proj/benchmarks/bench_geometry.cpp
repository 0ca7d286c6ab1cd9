#include <benchmark/benchmark.h>

#include "miscal/geometry.hpp"
#include "miscal/rng.hpp"

namespace {

using namespace miscal;

void BM_RotationFromMisalignment(benchmark::State& state) {
  const EulerMisalignment dr{0.3, -0.5, 0.9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rotation_from_misalignment(dr));
  }
}
BENCHMARK(BM_RotationFromMisalignment);

void BM_RenderDepthImage(benchmark::State& state) {
  const CameraIntrinsics k = CameraIntrinsics::reference();
  Rng rng(3);
  std::vector<Point3> points;
  for (int i = 0; i < state.range(0); ++i) {
    const double z = rng.uniform(20.0, 480.0);
    points.emplace_back(rng.uniform(-0.25, 0.25) * z, rng.uniform(-0.13, 0.13) * z, z);
  }
  const RigidTransform t;
  for (auto _ : state) {
    auto img = render_depth_image(points, t, k);
    benchmark::DoNotOptimize(img);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RenderDepthImage)->Arg(10000)->Arg(100000);

}  // namespace
