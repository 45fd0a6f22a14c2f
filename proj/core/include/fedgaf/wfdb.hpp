#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fedgaf/beat.hpp"

namespace fedgaf {

struct SignalInfo {
  std::string file_name;
  int storage_format = 212;
  double gain = 200.0;  // adu per mV
  int baseline = 0;     // adu at 0 physical units
};

struct RecordHeader {
  std::string record_name;
  int num_signals = 0;
  double sampling_rate = 360.0;
  std::uint64_t num_samples = 0;  // per signal
  std::vector<SignalInfo> signals;
};

// Parses the text header of a record. The first non-comment line carries
// "name num_signals [rate [num_samples]]"; one signal line per declared
// signal follows with "file format [gain[(baseline)][/units] [adcres
// [adczero ...]]]". Missing optional fields default to 360 Hz, gain 200,
// baseline 0 (or the adc-zero field when present).
RecordHeader parse_header(std::span<const std::string> lines);

// Format 212 packs two 12-bit two's-complement samples into three bytes:
// byte0 = low 8 bits of s1, low nibble of byte1 = high 4 bits of s1,
// high nibble of byte1 = high 4 bits of s2, byte2 = low 8 bits of s2.
std::vector<int> decode_format212_raw(std::span<const std::byte> bytes,
                                      std::size_t num_samples);
std::vector<double> decode_format212(std::span<const std::byte> bytes,
                                     std::size_t num_samples, double gain,
                                     int baseline);
// Inverse of the raw decode; odd sample counts pad the trailing half-pair
// with zero. Values must fit in 12 bits.
std::vector<std::byte> encode_format212(std::span<const int> raw);

struct Annotation {
  std::uint64_t sample_index = 0;
  int code = 0;
};

// Decodes an MIT-format annotation stream: 2-byte LE words with
// code = word >> 10 and interval = word & 0x3FF. Word 0 terminates.
// Code 63 (AUX) skips its payload padded to even length; code 59 (SKIP)
// consumes a 4-byte time offset (high word first) and advances time;
// codes 60-62 carry attribute values and are consumed silently. Every
// other code advances time by its interval and emits an annotation.
std::vector<Annotation> parse_annotations(std::span<const std::byte> bytes);

// Standard beat codes for the five target classes.
const std::map<int, BeatLabel>& default_beat_codes();

struct ExtractResult {
  std::vector<BeatRecord> beats;
  std::size_t dropped = 0;  // beats whose window crossed a record boundary
};

// Cuts window-length segments [r - window/2, r + window/2) around each
// annotated beat whose code is in code_map. Out-of-bounds windows are
// dropped and counted.
ExtractResult extract_beats(std::span<const float> signal,
                            std::span<const Annotation> annotations, int window,
                            const std::map<int, BeatLabel>& code_map,
                            const std::string& record_name);

struct WfdbRecord {
  RecordHeader header;
  std::vector<float> channel0_mv;
  std::vector<Annotation> annotations;
};

// Loads a <name>.hea / <name>.dat / <name>.atr triplet. Only format 212 is
// supported; multi-signal records are de-interleaved and channel 0 kept.
WfdbRecord load_record(const std::filesystem::path& header_path);

}  // namespace fedgaf
