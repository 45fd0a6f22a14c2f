#include <bit>
#include <cstring>

#include "doctest.h"
#include "fedgaf/errors.hpp"
#include "fedgaf/nn/model.hpp"
#include "fedgaf/rng.hpp"
#include "fedgaf/wire/serialize.hpp"

using namespace fedgaf;

TEST_SUITE_BEGIN("serialize");

TEST_CASE("empty parameter list is a bare count") {
  const ModelParams empty;
  const auto bytes = serialize_params(empty);
  REQUIRE(bytes.size() == 4);
  for (std::byte b : bytes) CHECK(b == std::byte{0});
  CHECK(serialized_params_size(empty) == 4);
}

TEST_CASE("single tensor layout, byte for byte") {
  ModelParams p;
  p.entries.emplace_back("b", Tensor({2}, {1.0f, 2.0f}));
  const auto bytes = serialize_params(p);
  // count(4) + name len(1) + 'b'(1) + ndim(1) + dim(4) + 2 floats(8) = 19
  REQUIRE(bytes.size() == 19);
  CHECK(serialized_params_size(p) == 19);

  const auto u8 = [&](std::size_t i) { return static_cast<unsigned>(bytes[i]); };
  CHECK(u8(0) == 1);  // tensor count, LE
  CHECK(u8(1) == 0);
  CHECK(u8(2) == 0);
  CHECK(u8(3) == 0);
  CHECK(u8(4) == 1);    // name length
  CHECK(u8(5) == 'b');  // name
  CHECK(u8(6) == 1);    // ndim
  CHECK(u8(7) == 2);    // dim 0, LE
  CHECK(u8(10) == 0);
  float v0, v1;
  std::memcpy(&v0, bytes.data() + 11, 4);
  std::memcpy(&v1, bytes.data() + 15, 4);
  CHECK(v0 == 1.0f);
  CHECK(v1 == 2.0f);
}

TEST_CASE("round-trip is exact for random parameter sets") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    ModelParams p;
    const std::size_t tensors = 1 + rng.below(6);
    for (std::size_t t = 0; t < tensors; ++t) {
      std::vector<std::size_t> shape;
      const std::size_t ndim = 1 + rng.below(4);
      for (std::size_t d = 0; d < ndim; ++d) shape.push_back(1 + rng.below(5));
      Tensor tensor(shape);
      for (float& v : tensor.data) v = static_cast<float>(rng.uniform(-10, 10));
      p.entries.emplace_back("t" + std::to_string(t), std::move(tensor));
    }
    const auto bytes = serialize_params(p);
    CHECK(bytes.size() == serialized_params_size(p));
    const ModelParams back = deserialize_params(bytes);
    REQUIRE(back.entries.size() == p.entries.size());
    for (std::size_t t = 0; t < p.entries.size(); ++t) {
      CHECK(back.entries[t].first == p.entries[t].first);
      CHECK(back.entries[t].second.shape == p.entries[t].second.shape);
      CHECK(back.entries[t].second.data == p.entries[t].second.data);
    }
    // identical params always give identical bytes
    CHECK(serialize_params(back) == bytes);
  }
}

TEST_CASE("deserialize rejects malformed streams") {
  const std::vector<std::byte> tiny = {std::byte{1}, std::byte{2}, std::byte{3}};
  CHECK_THROWS_AS(deserialize_params(tiny), DeserializeError);

  ModelParams p;
  p.entries.emplace_back("w", Tensor({3}, {1, 2, 3}));
  auto bytes = serialize_params(p);

  SUBCASE("trailing garbage") {
    bytes.push_back(std::byte{0});
    CHECK_THROWS_AS(deserialize_params(bytes), DeserializeError);
  }
  SUBCASE("truncation anywhere") {
    for (std::size_t keep = 0; keep < bytes.size(); ++keep) {
      const std::vector<std::byte> cut(bytes.begin(),
                                       bytes.begin() + static_cast<std::ptrdiff_t>(keep));
      CHECK_THROWS_AS(deserialize_params(cut), DeserializeError);
    }
  }
  SUBCASE("dimension overflow") {
    // count 1, name "x", ndim 4, dims 65536^4
    std::vector<std::byte> evil = {std::byte{1}, std::byte{0}, std::byte{0}, std::byte{0},
                                   std::byte{1}, std::byte{'x'}, std::byte{4}};
    for (int d = 0; d < 4; ++d) {
      evil.push_back(std::byte{0});
      evil.push_back(std::byte{0});
      evil.push_back(std::byte{1});
      evil.push_back(std::byte{0});
    }
    CHECK_THROWS_AS(deserialize_params(evil), DeserializeError);
  }
}

TEST_CASE("names longer than 255 bytes cannot serialize") {
  ModelParams p;
  p.entries.emplace_back(std::string(256, 'n'), Tensor({1}));
  CHECK_THROWS_AS(serialize_params(p), SerializeError);
}

TEST_CASE("checkpoint embeds the spec header ahead of the parameters") {
  namespace fs = std::filesystem;
  ModelSpec spec;
  spec.c1 = 4;
  spec.fc = 32;
  spec.alpha = 0.05f;
  const ModelParams params = init_params(spec, 77);
  const fs::path path = fs::temp_directory_path() / "fedgaf_ckpt_test.bin";
  save_checkpoint(path, spec, params);

  const Checkpoint back = load_checkpoint(path);
  CHECK(back.spec == spec);
  REQUIRE(back.params.entries.size() == params.entries.size());
  for (std::size_t t = 0; t < params.entries.size(); ++t) {
    CHECK(back.params.entries[t].second.data == params.entries[t].second.data);
  }
  fs::remove(path);
}

TEST_SUITE_END();
