#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fedgaf/nn/adam.hpp"
#include "fedgaf/nn/model.hpp"

namespace fedgaf {

enum class Aggregation : std::uint8_t { uniform = 0, sample_weighted = 1 };
enum class TransportMode : std::uint8_t { loopback = 0, tcp = 1 };

struct ClientSpec {
  std::string id;
  double share = 0.0;
};

struct FederationConfig {
  int rounds = 10;
  int local_epochs = 10;
  double lr = 0.001;
  int batch_size = 32;
  Aggregation aggregation = Aggregation::uniform;
  std::uint64_t seed = 0;
  std::vector<ClientSpec> clients;
  ModelSpec model;
  TransportMode transport_mode = TransportMode::loopback;
  double timeout_sec = 600.0;
  int threads = 1;

  AdamConfig adam() const { return AdamConfig{lr, 0.9, 0.999, 1e-8}; }

  // rounds >= 1, local_epochs >= 1, at least one client with a unique id,
  // shares positive and summing to 1 within 1e-9. Throws ConfigError.
  void validate() const;
};

// JSON keys: rounds, local_epochs, lr, batch_size, aggregation, seed,
// clients[{id, share}], model{c1,c2,c3,c4,fc,classes,alpha},
// transport{mode, timeout_sec}, threads. Missing keys take the defaults.
FederationConfig parse_config(const std::string& json_text);
FederationConfig load_config(const std::filesystem::path& path);

// Canonical JSON echo; stable byte-for-byte for equal configs.
std::string config_to_json(const FederationConfig& cfg);

}  // namespace fedgaf
