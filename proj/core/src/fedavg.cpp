#include "fedgaf/fed/fedavg.hpp"

#include <algorithm>
#include <numeric>

#include "fedgaf/errors.hpp"
#include "fedgaf/rng.hpp"

namespace fedgaf {

std::uint64_t init_seed(std::uint64_t config_seed) {
  return splitmix64(config_seed ^ 0x494e495400000000ULL);
}

std::uint64_t epoch_seed(std::uint64_t config_seed, std::uint32_t round, int epoch) {
  return mix_seed(splitmix64(config_seed ^ 0x45504f4348000000ULL), round,
                  static_cast<std::uint64_t>(epoch));
}

ModelParams aggregate(std::span<const ClientUpdate> updates, Aggregation mode) {
  if (updates.empty()) throw AggregationError("no updates to aggregate");

  std::vector<std::size_t> order(updates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return updates[a].client_id < updates[b].client_id;
  });

  const ClientUpdate& first = updates[order[0]];
  for (std::size_t i : order) {
    if (updates[i].round != first.round) {
      throw AggregationError("updates span different rounds");
    }
    if (!updates[i].params.same_shapes(first.params)) {
      throw AggregationError("update from '" + updates[i].client_id +
                             "' has mismatched parameter shapes");
    }
  }

  double total_weight = 0.0;
  for (std::size_t i : order) {
    total_weight += mode == Aggregation::uniform
                        ? 1.0
                        : static_cast<double>(updates[i].sample_count);
  }
  if (total_weight <= 0.0) {
    throw AggregationError("aggregation weights sum to zero");
  }

  // Accumulate in double in ascending client_id order, then divide; this
  // keeps the mean of k identical models bit-identical to the input.
  ModelParams out = zeros_like(first.params);
  std::vector<std::vector<double>> acc(out.entries.size());
  for (std::size_t p = 0; p < out.entries.size(); ++p) {
    acc[p].assign(out.entries[p].second.size(), 0.0);
  }
  for (std::size_t i : order) {
    const double w = mode == Aggregation::uniform
                         ? 1.0
                         : static_cast<double>(updates[i].sample_count);
    for (std::size_t p = 0; p < out.entries.size(); ++p) {
      const auto& src = updates[i].params.entries[p].second.data;
      auto& dst = acc[p];
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += w * src[k];
    }
  }
  for (std::size_t p = 0; p < out.entries.size(); ++p) {
    auto& dst = out.entries[p].second.data;
    for (std::size_t k = 0; k < dst.size(); ++k) {
      dst[k] = static_cast<float>(acc[p][k] / total_weight);
    }
  }
  return out;
}

ClientUpdate local_update(const ModelParams& global, const ModelSpec& spec,
                          const std::vector<GafImage>& shard, int epochs,
                          const AdamConfig& adam_cfg, int batch_size,
                          std::uint64_t config_seed, std::uint32_t round,
                          const std::string& client_id, int threads) {
  if (epochs < 1) throw ConfigError("local epochs must be at least 1");
  if (shard.empty()) throw ConfigError("client '" + client_id + "' has an empty shard");

  ClientUpdate update;
  update.client_id = client_id;
  update.round = round;
  update.sample_count = static_cast<std::uint32_t>(shard.size());
  update.params = global;

  AdamState opt(update.params);  // fresh moments every round
  double loss = 0.0, acc = 0.0;
  for (int e = 0; e < epochs; ++e) {
    const EpochMetrics m =
        train_epoch(update.params, opt, spec, shard,
                    static_cast<std::size_t>(batch_size), adam_cfg,
                    epoch_seed(config_seed, round, e), threads);
    loss += m.mean_loss;
    acc += m.accuracy;
  }
  update.metrics.mean_loss = loss / epochs;
  update.metrics.train_accuracy = acc / epochs;
  return update;
}

}  // namespace fedgaf
