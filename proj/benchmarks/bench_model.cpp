#include <benchmark/benchmark.h>

#include "pagefuse/model.hpp"
#include "pagefuse/rng.hpp"
#include "pagefuse/train.hpp"

using namespace pagefuse;

namespace {

LabeledInput random_input(int side, int channels, int classes, uint64_t seed) {
  Rng rng(seed);
  LabeledInput li;
  li.input = Image(side, side, channels);
  for (auto& v : li.input.data) v = rng.uniform();
  li.mask = ClassMask(side, side, 0);
  for (auto& m : li.mask.labels) m = static_cast<uint8_t>(rng.below(classes + 1));
  return li;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  PixelModel model = PixelModel::create(5, 2, {8, 8}, 3);
  LabeledInput li = random_input(side, 5, 2, 4);
  for (auto _ : state) {
    Image logits = forward_logits(model, li.input);
    benchmark::DoNotOptimize(logits.data.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(side) * side);
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(128);

static void BM_TrainStep(benchmark::State& state) {
  PixelModel model = PixelModel::create(5, 2, {8, 8}, 3);
  std::vector<LabeledInput> batch;
  for (int i = 0; i < 4; ++i) batch.push_back(random_input(64, 5, 2, 10 + i));
  std::vector<double> grads;
  for (auto _ : state) {
    double loss = compute_loss_and_grads(model, batch, 1e-6, grads);
    benchmark::DoNotOptimize(loss);
    benchmark::DoNotOptimize(grads.data());
  }
}
BENCHMARK(BM_TrainStep);
