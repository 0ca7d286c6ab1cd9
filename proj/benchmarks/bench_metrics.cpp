#include <benchmark/benchmark.h>

#include "miscal/metrics.hpp"
#include "miscal/rng.hpp"

namespace {

using namespace miscal;

void BM_BevIou(benchmark::State& state) {
  Rng rng(4);
  std::vector<std::pair<BevBox, BevBox>> pairs;
  for (int i = 0; i < 256; ++i) {
    const BevBox a{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(2, 14),
                   rng.uniform(1, 4), rng.uniform(0, 2 * kPi)};
    BevBox b = a;
    b.cx += rng.uniform(-4, 4);
    b.cy += rng.uniform(-4, 4);
    b.yaw = rng.uniform(0, 2 * kPi);
    pairs.push_back({a, b});
  }
  size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ & 255];
    benchmark::DoNotOptimize(bev_iou(a, b));
  }
}
BENCHMARK(BM_BevIou);

void BM_MaxF1(benchmark::State& state) {
  Rng rng(5);
  std::vector<BevBox> gts;
  std::vector<Detection> dets;
  for (int i = 0; i < state.range(0); ++i) {
    const BevBox g{12.0 * i, rng.uniform(-3, 3), rng.uniform(3, 10), rng.uniform(2, 3),
                   rng.uniform(0, kPi)};
    gts.push_back(g);
    BevBox d = g;
    d.cx += rng.uniform(-3, 3);
    dets.push_back({d, rng.uniform(0.0, 1.0)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_f1(dets, gts, 0.1));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MaxF1)->RangeMultiplier(2)->Range(16, 256)->Complexity();

}  // namespace
