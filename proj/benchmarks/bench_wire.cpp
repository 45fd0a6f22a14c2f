#include <benchmark/benchmark.h>

#include "fedgaf/nn/model.hpp"
#include "fedgaf/wire/frame.hpp"
#include "fedgaf/wire/serialize.hpp"

using namespace fedgaf;

namespace {

void BM_SerializeParams(benchmark::State& state) {
  const ModelParams params = init_params(ModelSpec{}, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(serialize_params(params));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(serialized_params_size(params)));
}
BENCHMARK(BM_SerializeParams);

void BM_DeserializeParams(benchmark::State& state) {
  const auto bytes = serialize_params(init_params(ModelSpec{}, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(deserialize_params(bytes));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(bytes.size()));
}
BENCHMARK(BM_DeserializeParams);

void BM_LoopbackRoundTrip(benchmark::State& state) {
  const auto payload = serialize_params(init_params(ModelSpec{}, 1));
  for (auto _ : state) {
    auto [a, b] = loopback_channel_pair();
    send_frame(*a, MessageType::global_model, payload);
    benchmark::DoNotOptimize(recv_frame(*b));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(payload.size() + kFrameHeaderSize));
}
BENCHMARK(BM_LoopbackRoundTrip);

}  // namespace

BENCHMARK_MAIN();
