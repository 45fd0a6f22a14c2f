#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fedgaf {

// The five heartbeat classes, in the fixed order that defines class indices
// 0..4 everywhere (labels, confusion matrices, per-class reports).
enum class BeatLabel : std::uint8_t { N = 0, L = 1, R = 2, A = 3, V = 4 };

inline constexpr int kNumClasses = 5;

char label_char(BeatLabel label);
std::optional<BeatLabel> label_from_char(char c);

// One extracted heartbeat: a fixed-length window of samples (mV) centered on
// the annotated R peak, plus provenance.
struct BeatRecord {
  std::vector<float> samples;
  BeatLabel label = BeatLabel::N;
  std::string record_name;
  std::uint32_t r_peak_index = 0;
};

// An ordered collection of beats sharing one window length. Splits and client
// shards are manifests of their own.
struct DatasetManifest {
  std::uint16_t window = 128;
  std::vector<BeatRecord> beats;

  std::array<std::size_t, kNumClasses> class_counts() const;
};

// Beat container ("FGDS"): magic, version byte, u16 window length, then one
// entry per beat: label byte, u32 LE r-peak index, u8 length-prefixed record
// name, window x f32 LE samples.
void save_beats(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest load_beats(const std::filesystem::path& path);

}  // namespace fedgaf
