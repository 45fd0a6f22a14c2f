#pragma once

#include <cstdint>
#include <vector>

#include "fedgaf/nn/layers.hpp"
#include "fedgaf/nn/model.hpp"

namespace fedgaf {

// Activations kept for the backward pass. p1/p4 are the pooled maps (the
// inputs of conv2 and fc1); z* are pre-activations.
template <class T>
struct ForwardCache {
  BasicTensor<T> input;
  BasicTensor<T> z1, p1, z2, a2, z3, a3, z4, p4, z5, a5;
  std::vector<std::uint32_t> idx1, idx4;
};

// Shape chain for a (1,S,S) input with S divisible by 4:
// conv1(7x7,pad3) -> pool -> conv2/conv3/conv4(5x5,pad2) -> pool ->
// flatten -> fc1 -> fc2 logits.
template <class T>
BasicTensor<T> net_forward(const BasicParams<T>& params, const ModelSpec& spec,
                           const BasicTensor<T>& image,
                           ForwardCache<T>* cache = nullptr) {
  if (image.shape.size() != 3 || image.shape[0] != 1) {
    throw ShapeError("net_forward: expected a (1,S,S) image, got " +
                     shape_string(image.shape));
  }
  if (image.shape[1] != image.shape[2] || image.shape[1] % 4 != 0) {
    throw ShapeError("net_forward: input must be square with side divisible by 4");
  }
  const T alpha = static_cast<T>(spec.alpha);

  auto z1 = conv2d(image, params.at("conv1.w"), params.at("conv1.b"), 3);
  auto a1 = leaky_relu(z1, alpha);
  std::vector<std::uint32_t> idx1;
  auto p1 = maxpool2d(a1, cache ? &idx1 : nullptr);

  auto z2 = conv2d(p1, params.at("conv2.w"), params.at("conv2.b"), 2);
  auto a2 = leaky_relu(z2, alpha);
  auto z3 = conv2d(a2, params.at("conv3.w"), params.at("conv3.b"), 2);
  auto a3 = leaky_relu(z3, alpha);
  auto z4 = conv2d(a3, params.at("conv4.w"), params.at("conv4.b"), 2);
  auto a4 = leaky_relu(z4, alpha);
  std::vector<std::uint32_t> idx4;
  auto p4 = maxpool2d(a4, cache ? &idx4 : nullptr);

  BasicTensor<T> flat({p4.size()}, p4.data);
  auto z5 = dense(flat, params.at("fc1.w"), params.at("fc1.b"));
  auto a5 = leaky_relu(z5, alpha);
  auto logits = dense(a5, params.at("fc2.w"), params.at("fc2.b"));

  if (cache) {
    cache->input = image;
    cache->z1 = std::move(z1);
    cache->idx1 = std::move(idx1);
    cache->p1 = std::move(p1);
    cache->z2 = std::move(z2);
    cache->a2 = std::move(a2);
    cache->z3 = std::move(z3);
    cache->a3 = std::move(a3);
    cache->z4 = std::move(z4);
    cache->idx4 = std::move(idx4);
    cache->p4 = std::move(p4);
    cache->z5 = std::move(z5);
    cache->a5 = std::move(a5);
  }
  return logits;
}

// Accumulates parameter gradients for one sample into grads (which must have
// the canonical shapes, e.g. from zeros_like).
template <class T>
void net_backward(const BasicParams<T>& params, const ModelSpec& spec,
                  const ForwardCache<T>& c, const BasicTensor<T>& dlogits,
                  BasicParams<T>& grads) {
  const T alpha = static_cast<T>(spec.alpha);

  auto g_fc2 = dense_backward(c.a5, params.at("fc2.w"), dlogits);
  add_into(grads.at("fc2.w"), g_fc2.weights);
  add_into(grads.at("fc2.b"), g_fc2.bias);

  auto dz5 = leaky_relu_backward(c.z5, alpha, g_fc2.input);
  BasicTensor<T> flat({c.p4.size()}, c.p4.data);
  auto g_fc1 = dense_backward(flat, params.at("fc1.w"), dz5);
  add_into(grads.at("fc1.w"), g_fc1.weights);
  add_into(grads.at("fc1.b"), g_fc1.bias);

  BasicTensor<T> dp4(c.p4.shape, std::move(g_fc1.input.data));
  auto da4 = maxpool2d_backward(c.z4.shape, c.idx4, dp4);
  auto dz4 = leaky_relu_backward(c.z4, alpha, da4);
  auto g4 = conv2d_backward(c.a3, params.at("conv4.w"), dz4, 2);
  add_into(grads.at("conv4.w"), g4.kernels);
  add_into(grads.at("conv4.b"), g4.bias);

  auto dz3 = leaky_relu_backward(c.z3, alpha, g4.input);
  auto g3 = conv2d_backward(c.a2, params.at("conv3.w"), dz3, 2);
  add_into(grads.at("conv3.w"), g3.kernels);
  add_into(grads.at("conv3.b"), g3.bias);

  auto dz2 = leaky_relu_backward(c.z2, alpha, g3.input);
  auto g2 = conv2d_backward(c.p1, params.at("conv2.w"), dz2, 2);
  add_into(grads.at("conv2.w"), g2.kernels);
  add_into(grads.at("conv2.b"), g2.bias);

  auto dp1 = maxpool2d_backward(c.z1.shape, c.idx1, g2.input);
  auto dz1 = leaky_relu_backward(c.z1, alpha, dp1);
  auto g1 = conv2d_backward(c.input, params.at("conv1.w"), dz1, 3);
  add_into(grads.at("conv1.w"), g1.kernels);
  add_into(grads.at("conv1.b"), g1.bias);
}

}  // namespace fedgaf
