#include <benchmark/benchmark.h>

#include "fedgaf/dataset.hpp"
#include "fedgaf/gaf.hpp"
#include "fedgaf/rng.hpp"

using namespace fedgaf;

namespace {

BeatRecord sample_beat(int window) {
  DatasetManifest m = synth_dataset(kNumClasses, 1, window, 7);
  return m.beats.front();
}

void BM_EncodeBilinear(benchmark::State& state) {
  const BeatRecord beat = sample_beat(static_cast<int>(state.range(0)));
  EncodeConfig cfg;
  cfg.resize = ResizePath::bilinear_image;
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_beat(beat, cfg));
  }
}
BENCHMARK(BM_EncodeBilinear)->Arg(128)->Arg(256);

void BM_EncodePaaFirst(benchmark::State& state) {
  const BeatRecord beat = sample_beat(static_cast<int>(state.range(0)));
  EncodeConfig cfg;
  cfg.resize = ResizePath::paa_first;
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_beat(beat, cfg));
  }
}
BENCHMARK(BM_EncodePaaFirst)->Arg(128)->Arg(256);

void BM_Gasf(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gasf(x));
  }
}
BENCHMARK(BM_Gasf)->Arg(32)->Arg(128);

}  // namespace
