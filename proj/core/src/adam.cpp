#include "fedgaf/nn/adam.hpp"

#include <cmath>

namespace fedgaf {

AdamState::AdamState(const ModelParams& params) {
  m.reserve(params.entries.size());
  v.reserve(params.entries.size());
  for (const auto& [name, t] : params.entries) {
    m.emplace_back(t.shape);
    v.emplace_back(t.shape);
  }
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const AdamConfig& cfg) {
  if (!params.same_shapes(grads)) throw ShapeError("adam_step: grads do not match params");
  if (state.m.size() != params.entries.size()) {
    throw ShapeError("adam_step: optimizer state does not match params");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));

  for (std::size_t p = 0; p < params.entries.size(); ++p) {
    Tensor& w = params.entries[p].second;
    const Tensor& g = grads.entries[p].second;
    Tensor& m = state.m[p];
    Tensor& v = state.v[p];
    if (!m.same_shape(w)) throw ShapeError("adam_step: moment shape mismatch");
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      const double gi = g.data[i];
      const double mi = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * gi;
      const double vi = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * gi * gi;
      m.data[i] = static_cast<float>(mi);
      v.data[i] = static_cast<float>(vi);
      const double m_hat = mi / bc1;
      const double v_hat = vi / bc2;
      w.data[i] = static_cast<float>(w.data[i] - cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps));
    }
  }
}

}  // namespace fedgaf
