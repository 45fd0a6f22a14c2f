#include "fedgaf/wire/serialize.hpp"

#include "fedgaf/wire/bytes.hpp"

namespace fedgaf {

std::vector<std::byte> serialize_params(const ModelParams& params) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(params.entries.size()));
  for (const auto& [name, t] : params.entries) {
    w.str8(name);
    if (t.shape.size() > 255) throw SerializeError("tensor rank exceeds 255");
    w.u8(static_cast<std::uint8_t>(t.shape.size()));
    for (std::size_t d : t.shape) {
      if (d > 0xFFFFFFFFULL) throw SerializeError("dimension exceeds u32");
      w.u32(static_cast<std::uint32_t>(d));
    }
    for (float v : t.data) w.f32(v);
  }
  return w.take();
}

ModelParams deserialize_params(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  const std::uint32_t count = r.u32();
  ModelParams params;
  params.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str8();
    const std::uint8_t ndim = r.u8();
    std::vector<std::size_t> shape;
    shape.reserve(ndim);
    std::uint64_t elems = 1;
    for (std::uint8_t d = 0; d < ndim; ++d) {
      const std::uint32_t dim = r.u32();
      shape.push_back(dim);
      elems *= dim;
      if (elems > (1ULL << 32)) throw DeserializeError("tensor dimension overflow");
    }
    if (elems * 4 > r.remaining()) {
      throw DeserializeError("truncated tensor payload for '" + name + "'");
    }
    Tensor t;
    t.shape = std::move(shape);
    t.data.resize(static_cast<std::size_t>(elems));
    for (float& v : t.data) v = r.f32();
    params.entries.emplace_back(std::move(name), std::move(t));
  }
  r.expect_end();
  return params;
}

std::size_t serialized_params_size(const ModelParams& params) {
  std::size_t n = 4;
  for (const auto& [name, t] : params.entries) {
    n += 1 + name.size() + 1 + 4 * t.shape.size() + 4 * t.data.size();
  }
  return n;
}

}  // namespace fedgaf
