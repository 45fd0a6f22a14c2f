#include "fedgaf/nn/train.hpp"

#include <algorithm>
#include <numeric>
#include <thread>

#include "fedgaf/errors.hpp"
#include "fedgaf/nn/net.hpp"
#include "fedgaf/rng.hpp"

namespace fedgaf {

Tensor image_tensor(const GafImage& image) {
  const auto s = static_cast<std::size_t>(image.size);
  return Tensor({1, s, s}, image.pixels);
}

namespace {

struct SliceResult {
  ModelParams grads;
  double loss_sum = 0.0;
  std::size_t correct = 0;
};

// Forward/backward over shard[order[lo..hi)], gradients summed in index order.
SliceResult run_slice(const ModelParams& params, const ModelSpec& spec,
                      const std::vector<GafImage>& shard,
                      const std::vector<std::size_t>& order, std::size_t lo,
                      std::size_t hi) {
  SliceResult r{zeros_like(params)};
  ForwardCache<float> cache;
  for (std::size_t k = lo; k < hi; ++k) {
    const GafImage& img = shard[order[k]];
    const Tensor input = image_tensor(img);
    const Tensor logits = net_forward(params, spec, input, &cache);
    const auto label = static_cast<std::size_t>(img.label);
    auto sm = softmax_cross_entropy(logits, label);
    r.loss_sum += sm.loss;
    std::size_t pred = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
      if (logits.data[i] > logits.data[pred]) pred = i;
    }
    if (pred == label) r.correct += 1;
    net_backward(params, spec, cache, sm.grad, r.grads);
  }
  return r;
}

}  // namespace

EpochMetrics train_epoch(ModelParams& params, AdamState& opt, const ModelSpec& spec,
                         const std::vector<GafImage>& shard, std::size_t batch_size,
                         const AdamConfig& adam_cfg, std::uint64_t seed,
                         int threads) {
  if (shard.empty()) throw ConfigError("cannot train on an empty shard");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (threads < 1) throw ConfigError("thread count must be positive");

  std::vector<std::size_t> order(shard.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  EpochMetrics metrics;
  double loss_sum = 0.0;
  std::size_t correct = 0;

  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, order.size());
    const std::size_t n = end - begin;

    std::vector<SliceResult> results;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (workers <= 1) {
      results.push_back(run_slice(params, spec, shard, order, begin, end));
    } else {
      results.resize(workers);
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::size_t wkr = 0; wkr < workers; ++wkr) {
        // Fixed contiguous slices: the merge order below is part of the
        // determinism contract.
        const std::size_t lo = begin + n * wkr / workers;
        const std::size_t hi = begin + n * (wkr + 1) / workers;
        pool.emplace_back([&, wkr, lo, hi] {
          results[wkr] = run_slice(params, spec, shard, order, lo, hi);
        });
      }
      for (auto& t : pool) t.join();
    }

    ModelParams grads = std::move(results[0].grads);
    loss_sum += results[0].loss_sum;
    correct += results[0].correct;
    for (std::size_t wkr = 1; wkr < results.size(); ++wkr) {
      for (std::size_t p = 0; p < grads.entries.size(); ++p) {
        add_into(grads.entries[p].second, results[wkr].grads.entries[p].second);
      }
      loss_sum += results[wkr].loss_sum;
      correct += results[wkr].correct;
    }

    const float inv = 1.0f / static_cast<float>(n);
    for (auto& [name, g] : grads.entries) {
      for (float& v : g.data) v *= inv;
    }
    adam_step(params, grads, opt, adam_cfg);
    metrics.steps += 1;
  }

  metrics.mean_loss = loss_sum / static_cast<double>(shard.size());
  metrics.accuracy = static_cast<double>(correct) / static_cast<double>(shard.size());
  return metrics;
}

}  // namespace fedgaf
