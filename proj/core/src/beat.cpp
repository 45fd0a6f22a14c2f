#include "fedgaf/beat.hpp"

#include <fstream>

#include "fedgaf/errors.hpp"
#include "fedgaf/wire/bytes.hpp"

namespace fedgaf {

namespace {
constexpr char kLabelChars[kNumClasses] = {'N', 'L', 'R', 'A', 'V'};
constexpr char kMagic[4] = {'F', 'G', 'D', 'S'};
constexpr std::uint8_t kVersion = 1;
}  // namespace

char label_char(BeatLabel label) { return kLabelChars[static_cast<int>(label)]; }

std::optional<BeatLabel> label_from_char(char c) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kLabelChars[i] == c) return static_cast<BeatLabel>(i);
  }
  return std::nullopt;
}

std::array<std::size_t, kNumClasses> DatasetManifest::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const BeatRecord& b : beats) counts[static_cast<int>(b.label)] += 1;
  return counts;
}

void save_beats(const std::filesystem::path& path, const DatasetManifest& manifest) {
  ByteWriter w;
  w.raw({kMagic, 4});
  w.u8(kVersion);
  w.u16(manifest.window);
  for (const BeatRecord& b : manifest.beats) {
    if (b.samples.size() != manifest.window) {
      throw SerializeError("beat length does not match manifest window");
    }
    w.u8(static_cast<std::uint8_t>(b.label));
    w.u32(b.r_peak_index);
    w.str8(b.record_name);
    for (float s : b.samples) w.f32(s);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(w.data().data()),
            static_cast<std::streamsize>(w.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

DatasetManifest load_beats(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  ByteReader r(std::as_bytes(std::span<const char>(raw)));

  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::string_view(magic, 4) != std::string_view(kMagic, 4)) {
    throw DeserializeError("not a beat container: " + path.string());
  }
  if (r.u8() != kVersion) throw DeserializeError("unsupported beat container version");

  DatasetManifest m;
  m.window = r.u16();
  if (m.window == 0) throw DeserializeError("zero window length");
  while (r.remaining() > 0) {
    BeatRecord b;
    const std::uint8_t label = r.u8();
    if (label >= kNumClasses) throw DeserializeError("bad label byte");
    b.label = static_cast<BeatLabel>(label);
    b.r_peak_index = r.u32();
    b.record_name = r.str8();
    b.samples.resize(m.window);
    for (float& s : b.samples) s = r.f32();
    m.beats.push_back(std::move(b));
  }
  return m;
}

}  // namespace fedgaf
