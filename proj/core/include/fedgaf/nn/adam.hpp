#pragma once

#include <cstdint>
#include <vector>

#include "fedgaf/nn/model.hpp"

namespace fedgaf {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers mirroring the parameter shapes.
struct AdamState {
  explicit AdamState(const ModelParams& params);

  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::int64_t t = 0;
};

// One bias-corrected Adam update: t increments first, then
// w -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace fedgaf
