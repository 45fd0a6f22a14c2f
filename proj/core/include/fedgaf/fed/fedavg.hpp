#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedgaf/fed/config.hpp"
#include "fedgaf/gaf.hpp"
#include "fedgaf/nn/train.hpp"

namespace fedgaf {

struct LocalMetrics {
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
};

struct ClientUpdate {
  std::string client_id;
  std::uint32_t round = 0;
  ModelParams params;
  std::uint32_t sample_count = 0;
  LocalMetrics metrics;
};

// Seed derivation shared by the federated runtime and by sequential replays:
// the epoch seed depends on the config seed, the round and the epoch index
// only, never on the client, so relabeling clients cannot change training.
std::uint64_t init_seed(std::uint64_t config_seed);
std::uint64_t epoch_seed(std::uint64_t config_seed, std::uint32_t round, int epoch);

// FedAvg: per-scalar mean of the updates, uniform or weighted by sample
// count, accumulated in double in ascending client_id order.
ModelParams aggregate(std::span<const ClientUpdate> updates, Aggregation mode);

// E local epochs of Adam training starting from the received global
// parameters with a fresh optimizer state. Metrics are the means over the
// epochs. Deterministic for fixed inputs.
ClientUpdate local_update(const ModelParams& global, const ModelSpec& spec,
                          const std::vector<GafImage>& shard, int epochs,
                          const AdamConfig& adam_cfg, int batch_size,
                          std::uint64_t config_seed, std::uint32_t round,
                          const std::string& client_id, int threads = 1);

}  // namespace fedgaf
