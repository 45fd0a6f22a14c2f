#include <benchmark/benchmark.h>

#include "fedgaf/dataset.hpp"
#include "fedgaf/gaf.hpp"
#include "fedgaf/nn/net.hpp"
#include "fedgaf/nn/train.hpp"

using namespace fedgaf;

namespace {

std::vector<GafImage> sample_images(int per_class) {
  const DatasetManifest m = synth_dataset(kNumClasses, per_class, 128, 11);
  EncodeConfig cfg;
  std::vector<GafImage> images;
  for (const BeatRecord& b : m.beats) images.push_back(encode_beat(b, cfg));
  return images;
}

void BM_Forward(benchmark::State& state) {
  const ModelSpec spec;
  const ModelParams params = init_params(spec, 1);
  const auto images = sample_images(1);
  const Tensor input = image_tensor(images.front());
  for (auto _ : state) {
    benchmark::DoNotOptimize(net_forward(params, spec, input));
  }
}
BENCHMARK(BM_Forward);

void BM_ForwardBackward(benchmark::State& state) {
  const ModelSpec spec;
  const ModelParams params = init_params(spec, 1);
  const auto images = sample_images(1);
  const Tensor input = image_tensor(images.front());
  ModelParams grads = zeros_like(params);
  for (auto _ : state) {
    ForwardCache<float> cache;
    const Tensor logits = net_forward(params, spec, input, &cache);
    const auto sm = softmax_cross_entropy(logits, 0);
    net_backward(params, spec, cache, sm.grad, grads);
    benchmark::DoNotOptimize(grads);
  }
}
BENCHMARK(BM_ForwardBackward);

void BM_TrainEpoch32(benchmark::State& state) {
  const ModelSpec spec;
  ModelParams params = init_params(spec, 1);
  AdamState opt(params);
  auto images = sample_images(7);
  images.resize(32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        train_epoch(params, opt, spec, images, 32, AdamConfig{}, 5));
  }
}
BENCHMARK(BM_TrainEpoch32);

}  // namespace
