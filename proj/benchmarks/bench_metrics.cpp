#include <benchmark/benchmark.h>

#include "pagefuse/postproc.hpp"
#include "pagefuse/rng.hpp"
#include "pagefuse/segmetrics.hpp"

using namespace pagefuse;

static void BM_IoU(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Rng rng(1);
  MaskPair mp;
  mp.height = side;
  mp.width = side;
  mp.predicted.resize(static_cast<size_t>(side) * side);
  mp.truth.resize(mp.predicted.size());
  for (auto& v : mp.predicted) v = rng.below(2);
  for (auto& v : mp.truth) v = rng.below(2);
  for (auto _ : state) {
    IoUResult r = iou(mp);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(side) * side);
}
BENCHMARK(BM_IoU)->Arg(256)->Arg(1024);

static void BM_ConnectedComponents(benchmark::State& state) {
  Rng rng(2);
  ClassMask mask(256, 256, 0);
  for (auto& v : mask.labels) v = static_cast<uint8_t>(rng.below(2));
  for (auto _ : state) {
    auto comps = connected_components(mask, 1, 8);
    benchmark::DoNotOptimize(comps.data());
  }
}
BENCHMARK(BM_ConnectedComponents);
