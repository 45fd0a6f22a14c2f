#include "fedgaf/nn/model.hpp"

#include <cmath>
#include <fstream>

#include "fedgaf/rng.hpp"
#include "fedgaf/wire/bytes.hpp"
#include "fedgaf/wire/serialize.hpp"

namespace fedgaf {

void validate(const ModelSpec& spec) {
  if (spec.c1 < 1 || spec.c2 < 1 || spec.c3 < 1 || spec.c4 < 1 || spec.fc < 1) {
    throw ConfigError("model channel and fc widths must be positive");
  }
  if (spec.classes < 2) throw ConfigError("model needs at least two classes");
  if (!(spec.alpha >= 0.0f && spec.alpha < 1.0f)) {
    throw ConfigError("leaky slope must be in [0, 1)");
  }
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> param_shapes(
    const ModelSpec& spec, int input_size) {
  validate(spec);
  if (input_size < 4 || input_size % 4 != 0) {
    throw ConfigError("input size must be a positive multiple of 4");
  }
  const auto c1 = static_cast<std::size_t>(spec.c1);
  const auto c2 = static_cast<std::size_t>(spec.c2);
  const auto c3 = static_cast<std::size_t>(spec.c3);
  const auto c4 = static_cast<std::size_t>(spec.c4);
  const auto fc = static_cast<std::size_t>(spec.fc);
  const auto classes = static_cast<std::size_t>(spec.classes);
  const auto side = static_cast<std::size_t>(input_size) / 4;  // two 2x2 pools
  return {
      {"conv1.w", {c1, 1, 7, 7}},   {"conv1.b", {c1}},
      {"conv2.w", {c2, c1, 5, 5}},  {"conv2.b", {c2}},
      {"conv3.w", {c3, c2, 5, 5}},  {"conv3.b", {c3}},
      {"conv4.w", {c4, c3, 5, 5}},  {"conv4.b", {c4}},
      {"fc1.w", {fc, c4 * side * side}}, {"fc1.b", {fc}},
      {"fc2.w", {classes, fc}},     {"fc2.b", {classes}},
  };
}

std::size_t param_count(const ModelSpec& spec, int input_size) {
  std::size_t n = 0;
  for (const auto& [name, shape] : param_shapes(spec, input_size)) {
    n += Tensor::count(shape);
  }
  return n;
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed, int input_size) {
  Rng rng(seed);
  ModelParams params;
  for (const auto& [name, shape] : param_shapes(spec, input_size)) {
    Tensor t(shape);
    if (name.ends_with(".w")) {
      // He-uniform: limit = sqrt(6 / fan_in); fan_in is everything past the
      // output dimension.
      std::size_t fan_in = 1;
      for (std::size_t d = 1; d < shape.size(); ++d) fan_in *= shape[d];
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
      for (float& v : t.data) v = static_cast<float>(rng.uniform(-limit, limit));
    }
    params.entries.emplace_back(name, std::move(t));
  }
  return params;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams out;
  out.entries.reserve(params.entries.size());
  for (const auto& [name, t] : params.entries) {
    out.entries.emplace_back(name, Tensor(t.shape));
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                     const ModelParams& params) {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(spec.c1));
  w.u16(static_cast<std::uint16_t>(spec.c2));
  w.u16(static_cast<std::uint16_t>(spec.c3));
  w.u16(static_cast<std::uint16_t>(spec.c4));
  w.u16(static_cast<std::uint16_t>(spec.fc));
  w.u16(static_cast<std::uint16_t>(spec.classes));
  w.f32(spec.alpha);
  const auto body = serialize_params(params);
  w.bytes(body);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(w.data().data()),
            static_cast<std::streamsize>(w.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  ByteReader r(std::as_bytes(std::span<const char>(raw)));

  Checkpoint ckpt;
  ckpt.spec.c1 = r.u16();
  ckpt.spec.c2 = r.u16();
  ckpt.spec.c3 = r.u16();
  ckpt.spec.c4 = r.u16();
  ckpt.spec.fc = r.u16();
  ckpt.spec.classes = r.u16();
  ckpt.spec.alpha = r.f32();
  validate(ckpt.spec);
  ckpt.params = deserialize_params(r.bytes(r.remaining()));
  return ckpt;
}

}  // namespace fedgaf
