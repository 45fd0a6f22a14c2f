#include "fedgaf/gaf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fedgaf/errors.hpp"
#include "fedgaf/wire/bytes.hpp"

namespace fedgaf {

namespace {
constexpr char kMagic[4] = {'F', 'G', 'I', 'M'};
constexpr std::uint8_t kVersion = 1;
constexpr double kClampTolerance = 1e-9;

// arccos input guard: clamp float-noise excursions, reject real violations.
double checked_unit(double v) {
  if (!std::isfinite(v)) throw EncodeError("non-finite value in rescaled series");
  if (v > 1.0 + kClampTolerance || v < -1.0 - kClampTolerance) {
    throw EncodeError("rescaled value outside [-1, 1]: " + std::to_string(v));
  }
  return std::clamp(v, -1.0, 1.0);
}
}  // namespace

std::vector<double> rescale_minmax(std::span<const double> x, RescaleRange range) {
  if (x.empty()) throw EncodeError("cannot rescale an empty series");
  double lo = x[0], hi = x[0];
  for (double v : x) {
    if (!std::isfinite(v)) throw EncodeError("non-finite sample in series");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double out_lo = range == RescaleRange::minus_one_one ? -1.0 : 0.0;
  const double out_hi = 1.0;
  std::vector<double> out;
  out.reserve(x.size());
  if (hi == lo) {
    const double mid = 0.5 * (out_lo + out_hi);
    out.assign(x.size(), mid);
    return out;
  }
  const double scale = (out_hi - out_lo) / (hi - lo);
  for (double v : x) {
    out.push_back(std::clamp(out_lo + (v - lo) * scale, out_lo, out_hi));
  }
  return out;
}

GramMatrix gasf(std::span<const double> scaled) {
  const std::size_t n = scaled.size();
  std::vector<double> x(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = checked_unit(scaled[i]);
    s[i] = std::sqrt(1.0 - x[i] * x[i]);  // sin(arccos x)
  }
  GramMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = x[i] * x[j] - s[i] * s[j];  // cos(phi_i + phi_j)
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  }
  return m;
}

GramMatrix gadf(std::span<const double> scaled) {
  const std::size_t n = scaled.size();
  std::vector<double> x(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = checked_unit(scaled[i]);
    s[i] = std::sqrt(1.0 - x[i] * x[i]);
  }
  GramMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.at(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = s[i] * x[j] - x[i] * s[j];  // sin(phi_i - phi_j)
      m.at(i, j) = v;
      m.at(j, i) = -v;
    }
  }
  return m;
}

std::vector<double> paa(std::span<const double> x, std::size_t segments) {
  if (segments == 0) throw EncodeError("paa needs at least one segment");
  const std::size_t n = x.size();
  if (segments > n) throw EncodeError("paa segment count exceeds series length");
  if (segments == n) return {x.begin(), x.end()};

  // Fractional coverage: segment k spans [k*n/m, (k+1)*n/m) with endpoint
  // samples weighted by their overlap, so the global mean is preserved.
  std::vector<double> out(segments);
  const double width = static_cast<double>(n) / static_cast<double>(segments);
  for (std::size_t k = 0; k < segments; ++k) {
    const double begin = width * static_cast<double>(k);
    const double end = width * static_cast<double>(k + 1);
    double acc = 0.0;
    std::size_t i = static_cast<std::size_t>(std::floor(begin));
    for (; i < n && static_cast<double>(i) < end; ++i) {
      const double lo = std::max(begin, static_cast<double>(i));
      const double hi = std::min(end, static_cast<double>(i + 1));
      if (hi > lo) acc += x[i] * (hi - lo);
    }
    out[k] = acc / width;
  }
  return out;
}

GramMatrix resize_bilinear(const GramMatrix& m, std::size_t out_size) {
  if (m.n == 0 || out_size == 0) throw EncodeError("resize needs nonzero sizes");
  if (out_size == m.n) return m;

  GramMatrix out(out_size);
  if (m.n == 1) {
    std::fill(out.values.begin(), out.values.end(), m.at(0, 0));
    return out;
  }
  // Corner-aligned sampling grid: output corners map onto input corners.
  const double step = out_size > 1
                          ? static_cast<double>(m.n - 1) / static_cast<double>(out_size - 1)
                          : 0.0;
  for (std::size_t oy = 0; oy < out_size; ++oy) {
    const double sy = step * static_cast<double>(oy);
    const std::size_t y0 = std::min(static_cast<std::size_t>(sy), m.n - 2);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t ox = 0; ox < out_size; ++ox) {
      const double sx = step * static_cast<double>(ox);
      const std::size_t x0 = std::min(static_cast<std::size_t>(sx), m.n - 2);
      const double fx = sx - static_cast<double>(x0);
      const double top = m.at(y0, x0) * (1.0 - fx) + m.at(y0, x0 + 1) * fx;
      const double bottom = m.at(y0 + 1, x0) * (1.0 - fx) + m.at(y0 + 1, x0 + 1) * fx;
      out.at(oy, ox) = top * (1.0 - fy) + bottom * fy;
    }
  }
  return out;
}

GafImage encode_beat(const BeatRecord& beat, const EncodeConfig& cfg) {
  if (cfg.output_size < 2) throw EncodeError("output size must be at least 2");
  std::vector<double> series(beat.samples.begin(), beat.samples.end());
  std::vector<double> scaled = rescale_minmax(series, cfg.range);
  if (cfg.resize == ResizePath::paa_first) {
    scaled = paa(scaled, static_cast<std::size_t>(cfg.output_size));
  }
  GramMatrix gram = cfg.method == GafMethod::gasf ? gasf(scaled) : gadf(scaled);
  if (cfg.resize == ResizePath::bilinear_image) {
    gram = resize_bilinear(gram, static_cast<std::size_t>(cfg.output_size));
  }

  GafImage img;
  img.size = cfg.output_size;
  img.label = beat.label;
  img.method = cfg.method;
  img.pixels.reserve(gram.values.size());
  for (double v : gram.values) {
    img.pixels.push_back(static_cast<float>(std::clamp(v, -1.0, 1.0)));
  }
  return img;
}

void save_images(const std::filesystem::path& path, std::span<const GafImage> images) {
  ByteWriter w;
  w.raw({kMagic, 4});
  w.u8(kVersion);
  w.u32(static_cast<std::uint32_t>(images.size()));
  const std::uint16_t size = images.empty() ? 0 : static_cast<std::uint16_t>(images[0].size);
  w.u16(size);
  for (const GafImage& img : images) {
    if (img.size != size || img.pixels.size() != static_cast<std::size_t>(size) * size) {
      throw SerializeError("image size mismatch in container");
    }
    w.u8(static_cast<std::uint8_t>(img.label));
    for (float p : img.pixels) w.f32(p);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(w.data().data()),
            static_cast<std::streamsize>(w.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<GafImage> load_images(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  ByteReader r(std::as_bytes(std::span<const char>(raw)));

  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::string_view(magic, 4) != std::string_view(kMagic, 4)) {
    throw DeserializeError("not an image container: " + path.string());
  }
  if (r.u8() != kVersion) throw DeserializeError("unsupported image container version");
  const std::uint32_t count = r.u32();
  const std::uint16_t size = r.u16();

  std::vector<GafImage> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    GafImage img;
    img.size = size;
    const std::uint8_t label = r.u8();
    if (label >= kNumClasses) throw DeserializeError("bad label byte");
    img.label = static_cast<BeatLabel>(label);
    img.pixels.resize(static_cast<std::size_t>(size) * size);
    for (float& p : img.pixels) p = r.f32();
    out.push_back(std::move(img));
  }
  r.expect_end();
  return out;
}

}  // namespace fedgaf
