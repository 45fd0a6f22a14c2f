#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedgaf/nn/model.hpp"

namespace fedgaf {

// Deterministic parameter bytes: u32 tensor count, then per tensor a u8
// length-prefixed name, u8 ndim, ndim u32 dims and the f32 LE values in
// row-major order. Identical params always produce identical bytes.
std::vector<std::byte> serialize_params(const ModelParams& params);

// Exact inverse; rejects truncation, absurd dims and trailing bytes.
ModelParams deserialize_params(std::span<const std::byte> bytes);

// Size of serialize_params output without materializing it.
std::size_t serialized_params_size(const ModelParams& params);

}  // namespace fedgaf
