#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fedgaf/beat.hpp"

namespace fedgaf {

enum class GafMethod : std::uint8_t { gasf = 0, gadf = 1 };
enum class RescaleRange : std::uint8_t { minus_one_one = 0, zero_one = 1 };
enum class ResizePath : std::uint8_t { bilinear_image = 0, paa_first = 1 };

struct EncodeConfig {
  GafMethod method = GafMethod::gasf;
  RescaleRange range = RescaleRange::minus_one_one;
  ResizePath resize = ResizePath::bilinear_image;
  int output_size = 32;
};

// A square angular-field image; pixels live in [-1, 1].
struct GafImage {
  int size = 0;
  BeatLabel label = BeatLabel::N;
  GafMethod method = GafMethod::gasf;
  std::vector<float> pixels;  // row-major, size*size
};

struct GramMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // row-major, n*n

  GramMatrix() = default;
  explicit GramMatrix(std::size_t size) : n(size), values(size * size, 0.0) {}

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

// Affine map of [min x, max x] onto the target range. A constant input maps
// every element to the range midpoint. Non-finite input is an error.
std::vector<double> rescale_minmax(std::span<const double> x, RescaleRange range);

// Summation field: out[i][j] = cos(phi_i + phi_j) with phi = arccos(x).
// Computed algebraically as x_i x_j - sqrt(1-x_i^2) sqrt(1-x_j^2), which is
// symmetric by construction. Inputs must lie in [-1, 1]; excursions within
// 1e-9 are clamped, larger ones are errors.
GramMatrix gasf(std::span<const double> scaled);

// Difference field: out[i][j] = sin(phi_i - phi_j); antisymmetric with an
// exactly zero diagonal.
GramMatrix gadf(std::span<const double> scaled);

// Piecewise aggregate approximation with fractional segment coverage.
// Preserves the global mean exactly (up to double rounding).
std::vector<double> paa(std::span<const double> x, std::size_t segments);

// Corner-aligned bilinear resampling. out_size == n is an exact copy; output
// values stay inside the input's [min, max].
GramMatrix resize_bilinear(const GramMatrix& m, std::size_t out_size);

// Full pipeline: rescale -> (paa when paa_first) -> gasf/gadf ->
// (bilinear resize when bilinear_image) -> clamp to [-1, 1] -> float pixels.
GafImage encode_beat(const BeatRecord& beat, const EncodeConfig& cfg);

// Image container ("FGIM"): magic, version byte, u32 count, u16 size, then
// per image a label byte and size*size f32 LE pixels, row-major.
void save_images(const std::filesystem::path& path, std::span<const GafImage> images);
std::vector<GafImage> load_images(const std::filesystem::path& path);

}  // namespace fedgaf
