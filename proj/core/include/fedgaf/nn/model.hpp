#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedgaf/tensor.hpp"

namespace fedgaf {

// Architecture knobs for the 4-conv CNN: a 7x7 stem, three 5x5 blocks,
// max-pooling after the first and fourth convolutions, one hidden dense
// layer, and a linear classifier head. LeakyReLU everywhere in between.
struct ModelSpec {
  int c1 = 8;
  int c2 = 16;
  int c3 = 16;
  int c4 = 16;
  int fc = 128;
  int classes = 5;
  float alpha = 0.01f;

  bool operator==(const ModelSpec&) const = default;
};

void validate(const ModelSpec& spec);

// Ordered, named parameter list. The canonical order (conv1..conv4 weights
// then biases, fc1, fc2) is load-bearing: serialization and aggregation
// iterate it as-is.
template <class T>
struct BasicParams {
  std::vector<std::pair<std::string, BasicTensor<T>>> entries;

  BasicTensor<T>& at(std::string_view name) {
    for (auto& [n, t] : entries) {
      if (n == name) return t;
    }
    throw ShapeError("unknown parameter: " + std::string(name));
  }
  const BasicTensor<T>& at(std::string_view name) const {
    for (const auto& [n, t] : entries) {
      if (n == name) return t;
    }
    throw ShapeError("unknown parameter: " + std::string(name));
  }

  bool same_shapes(const BasicParams& other) const {
    if (entries.size() != other.entries.size()) return false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].first != other.entries[i].first) return false;
      if (entries[i].second.shape != other.entries[i].second.shape) return false;
    }
    return true;
  }

  template <class U>
  BasicParams<U> cast() const {
    BasicParams<U> out;
    out.entries.reserve(entries.size());
    for (const auto& [n, t] : entries) {
      out.entries.emplace_back(n, t.template cast<U>());
    }
    return out;
  }
};

using ModelParams = BasicParams<float>;

// Canonical (name, shape) table for a spec at a given square input size.
std::vector<std::pair<std::string, std::vector<std::size_t>>> param_shapes(
    const ModelSpec& spec, int input_size = 32);

// Exact trainable scalar count.
std::size_t param_count(const ModelSpec& spec, int input_size = 32);

// Seeded He-uniform initialization for weights, zero biases.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed, int input_size = 32);

ModelParams zeros_like(const ModelParams& params);

// Checkpoint file: the ModelSpec header (u16 c1..c4, fc, classes, f32 alpha,
// all little-endian) followed by the wire parameter serialization.
void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                     const ModelParams& params);
struct Checkpoint {
  ModelSpec spec;
  ModelParams params;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fedgaf
