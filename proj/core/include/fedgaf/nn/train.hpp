#pragma once

#include <cstdint>
#include <vector>

#include "fedgaf/gaf.hpp"
#include "fedgaf/nn/adam.hpp"
#include "fedgaf/nn/model.hpp"

namespace fedgaf {

struct EpochMetrics {
  double mean_loss = 0.0;
  double accuracy = 0.0;
  std::size_t steps = 0;
};

Tensor image_tensor(const GafImage& image);

// One pass over the shard: seeded shuffle, then one Adam step per minibatch
// (the last batch may be short). Gradients are averaged over the batch.
// Deterministic for a fixed (params, shard, seed, threads); threads > 1
// splits each batch into fixed contiguous slices whose gradient sums are
// merged in slice order.
EpochMetrics train_epoch(ModelParams& params, AdamState& opt, const ModelSpec& spec,
                         const std::vector<GafImage>& shard, std::size_t batch_size,
                         const AdamConfig& adam_cfg, std::uint64_t seed,
                         int threads = 1);

}  // namespace fedgaf
