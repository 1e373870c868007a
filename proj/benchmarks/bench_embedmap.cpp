#include <benchmark/benchmark.h>

#include "pagefuse/embedmap.hpp"
#include "pagefuse/rng.hpp"

using namespace pagefuse;

static void BM_BuildMap(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  EmbeddingStore store(16, OovPolicy::SubwordHash, "bench");
  Rng rng(1);
  std::vector<Token> tokens;
  for (int i = 0; i < 200; ++i) {
    int x0 = static_cast<int>(rng.below(side - 8));
    int y0 = static_cast<int>(rng.below(side - 4));
    tokens.push_back({"tok" + std::to_string(i % 40),
                      Box{x0, y0, x0 + 8, y0 + 3}, i});
  }
  for (auto _ : state) {
    TextEmbeddingMap map = build_map(side, side, tokens, store);
    benchmark::DoNotOptimize(map.owner.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(side) * side);
}
BENCHMARK(BM_BuildMap)->Arg(64)->Arg(256);

static void BM_RasterizeOwners(benchmark::State& state) {
  Rng rng(2);
  std::vector<Token> tokens;
  for (int i = 0; i < 300; ++i) {
    int x0 = static_cast<int>(rng.below(500));
    int y0 = static_cast<int>(rng.below(500));
    tokens.push_back({"t", Box{x0, y0, x0 + 10, y0 + 4}, i});
  }
  for (auto _ : state) {
    auto owners = rasterize_owners(512, 512, tokens);
    benchmark::DoNotOptimize(owners.data());
  }
}
BENCHMARK(BM_RasterizeOwners);
