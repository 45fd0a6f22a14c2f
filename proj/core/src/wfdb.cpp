#include "fedgaf/wfdb.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fedgaf/errors.hpp"

namespace fedgaf {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Leading decimal integer of a token ("212x4" -> 212). Empty prefix is an error.
long leading_int(const std::string& tok, const char* what) {
  long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p == tok.data()) {
    throw ParseError(std::string("bad ") + what + ": '" + tok + "'");
  }
  return v;
}

double leading_double(const std::string& tok, const char* what) {
  // strtod accepts the longest numeric prefix, which matches header tokens
  // like "360/360" or "200(1024)/mV".
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) throw ParseError(std::string("bad ") + what + ": '" + tok + "'");
  return v;
}

std::vector<char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

RecordHeader parse_header(std::span<const std::string> lines) {
  // Skip comments and blank lines.
  std::vector<const std::string*> content;
  for (const std::string& l : lines) {
    std::size_t i = 0;
    while (i < l.size() && std::isspace(static_cast<unsigned char>(l[i]))) ++i;
    if (i == l.size() || l[i] == '#') continue;
    content.push_back(&l);
  }
  if (content.empty()) throw ParseError("empty header");

  const auto first = split_ws(*content[0]);
  if (first.size() < 2) throw ParseError("record line needs at least name and signal count");

  RecordHeader h;
  h.record_name = first[0].substr(0, first[0].find('/'));
  h.num_signals = static_cast<int>(leading_int(first[1], "signal count"));
  if (h.num_signals < 1) throw ParseError("record must declare at least one signal");
  if (first.size() >= 3) {
    h.sampling_rate = leading_double(first[2], "sampling rate");
    if (h.sampling_rate <= 0) throw ParseError("sampling rate must be positive");
  }
  if (first.size() >= 4) {
    h.num_samples = static_cast<std::uint64_t>(leading_int(first[3], "sample count"));
  }

  if (content.size() < 1 + static_cast<std::size_t>(h.num_signals)) {
    throw ParseError("header declares " + std::to_string(h.num_signals) +
                     " signals but has " + std::to_string(content.size() - 1) +
                     " signal lines");
  }
  for (int s = 0; s < h.num_signals; ++s) {
    const auto tok = split_ws(*content[1 + s]);
    if (tok.size() < 2) throw ParseError("signal line needs file name and format");
    SignalInfo info;
    info.file_name = tok[0];
    info.storage_format = static_cast<int>(leading_int(tok[1], "storage format"));
    bool explicit_baseline = false;
    if (tok.size() >= 3) {
      const double gain = leading_double(tok[2], "gain");
      info.gain = gain > 0 ? gain : 200.0;  // 0 means uncalibrated
      const auto paren = tok[2].find('(');
      if (paren != std::string::npos) {
        info.baseline = static_cast<int>(leading_int(tok[2].substr(paren + 1), "baseline"));
        explicit_baseline = true;
      }
    }
    // WFDB semantics: without an explicit "(baseline)" the adc-zero field
    // (token 5) is the baseline; absent both, it is 0.
    if (!explicit_baseline && tok.size() >= 5) {
      info.baseline = static_cast<int>(leading_int(tok[4], "adc zero"));
    }
    h.signals.push_back(std::move(info));
  }
  return h;
}

std::vector<int> decode_format212_raw(std::span<const std::byte> bytes,
                                      std::size_t num_samples) {
  const std::size_t needed = (num_samples + 1) / 2 * 3;
  if (bytes.size() < needed) {
    throw ParseError("format 212 stream too short: need " + std::to_string(needed) +
                     " bytes, have " + std::to_string(bytes.size()));
  }
  std::vector<int> out;
  out.reserve(num_samples);
  for (std::size_t pair = 0; out.size() < num_samples; ++pair) {
    const auto b0 = static_cast<unsigned>(bytes[pair * 3]);
    const auto b1 = static_cast<unsigned>(bytes[pair * 3 + 1]);
    const auto b2 = static_cast<unsigned>(bytes[pair * 3 + 2]);
    int s1 = static_cast<int>(((b1 & 0x0F) << 8) | b0);
    int s2 = static_cast<int>(((b1 & 0xF0) << 4) | b2);
    if (s1 >= 2048) s1 -= 4096;  // 12-bit two's complement
    if (s2 >= 2048) s2 -= 4096;
    out.push_back(s1);
    if (out.size() < num_samples) out.push_back(s2);
  }
  return out;
}

std::vector<double> decode_format212(std::span<const std::byte> bytes,
                                     std::size_t num_samples, double gain,
                                     int baseline) {
  const std::vector<int> raw = decode_format212_raw(bytes, num_samples);
  std::vector<double> out;
  out.reserve(raw.size());
  for (int v : raw) out.push_back((v - baseline) / gain);
  return out;
}

std::vector<std::byte> encode_format212(std::span<const int> raw) {
  std::vector<std::byte> out;
  out.reserve((raw.size() + 1) / 2 * 3);
  for (std::size_t i = 0; i < raw.size(); i += 2) {
    const int a = raw[i];
    const int b = i + 1 < raw.size() ? raw[i + 1] : 0;
    if (a < -2048 || a > 2047 || b < -2048 || b > 2047) {
      throw ParseError("sample out of 12-bit range");
    }
    const unsigned ua = static_cast<unsigned>(a & 0xFFF);
    const unsigned ub = static_cast<unsigned>(b & 0xFFF);
    out.push_back(static_cast<std::byte>(ua & 0xFF));
    out.push_back(static_cast<std::byte>(((ua >> 8) & 0x0F) | ((ub >> 4) & 0xF0)));
    out.push_back(static_cast<std::byte>(ub & 0xFF));
  }
  return out;
}

std::vector<Annotation> parse_annotations(std::span<const std::byte> bytes) {
  std::vector<Annotation> out;
  std::uint64_t time = 0;
  std::size_t pos = 0;
  const auto read_word = [&]() -> unsigned {
    if (pos + 2 > bytes.size()) throw ParseError("annotation stream truncated mid-entry");
    const unsigned lo = static_cast<unsigned>(bytes[pos]);
    const unsigned hi = static_cast<unsigned>(bytes[pos + 1]);
    pos += 2;
    return (hi << 8) | lo;
  };

  while (pos < bytes.size()) {
    const unsigned word = read_word();
    const int code = static_cast<int>(word >> 10);
    const unsigned interval = word & 0x3FF;
    if (word == 0) break;  // explicit terminator
    switch (code) {
      case 59: {  // SKIP: 4-byte time offset, high word first
        const unsigned hi = read_word();
        const unsigned lo = read_word();
        time += (static_cast<std::uint64_t>(hi) << 16) | lo;
        break;
      }
      case 60:  // NUM
      case 61:  // SUB
      case 62:  // CHN: attribute carriers, no time advance
        break;
      case 63: {  // AUX: skip payload padded to even length
        const std::size_t skip = interval + (interval & 1);
        if (pos + skip > bytes.size()) throw ParseError("annotation aux field truncated");
        pos += skip;
        break;
      }
      default:
        time += interval;
        out.push_back(Annotation{time, code});
        break;
    }
  }
  return out;
}

const std::map<int, BeatLabel>& default_beat_codes() {
  static const std::map<int, BeatLabel> codes = {
      {1, BeatLabel::N}, {2, BeatLabel::L}, {3, BeatLabel::R},
      {8, BeatLabel::A}, {5, BeatLabel::V},
  };
  return codes;
}

ExtractResult extract_beats(std::span<const float> signal,
                            std::span<const Annotation> annotations, int window,
                            const std::map<int, BeatLabel>& code_map,
                            const std::string& record_name) {
  if (window <= 0 || window % 2 != 0) throw ConfigError("beat window must be even and positive");
  const std::size_t half = static_cast<std::size_t>(window) / 2;
  ExtractResult result;
  for (const Annotation& a : annotations) {
    const auto it = code_map.find(a.code);
    if (it == code_map.end()) continue;
    if (a.sample_index < half || a.sample_index + half > signal.size()) {
      result.dropped += 1;
      continue;
    }
    BeatRecord b;
    b.label = it->second;
    b.record_name = record_name;
    b.r_peak_index = static_cast<std::uint32_t>(a.sample_index);
    const std::size_t begin = a.sample_index - half;
    b.samples.assign(signal.begin() + static_cast<std::ptrdiff_t>(begin),
                     signal.begin() + static_cast<std::ptrdiff_t>(begin + window));
    result.beats.push_back(std::move(b));
  }
  return result;
}

WfdbRecord load_record(const std::filesystem::path& header_path) {
  std::ifstream in(header_path);
  if (!in) throw IoError("cannot open: " + header_path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);

  WfdbRecord rec;
  rec.header = parse_header(lines);
  const SignalInfo& ch0 = rec.header.signals.at(0);
  if (ch0.storage_format != 212) {
    throw ParseError("unsupported storage format " + std::to_string(ch0.storage_format) +
                     " in " + header_path.string());
  }

  const auto dir = header_path.parent_path();
  const auto dat = read_file_bytes(dir / ch0.file_name);
  const std::size_t nsig = static_cast<std::size_t>(rec.header.num_signals);
  std::size_t per_signal = rec.header.num_samples;
  if (per_signal == 0) per_signal = dat.size() / 3 * 2 / nsig;

  const auto raw = decode_format212_raw(std::as_bytes(std::span<const char>(dat)),
                                        per_signal * nsig);
  rec.channel0_mv.reserve(per_signal);
  for (std::size_t t = 0; t < per_signal; ++t) {
    const int v = raw[t * nsig];
    rec.channel0_mv.push_back(static_cast<float>((v - ch0.baseline) / ch0.gain));
  }

  auto atr_path = header_path;
  atr_path.replace_extension(".atr");
  const auto atr = read_file_bytes(atr_path);
  rec.annotations = parse_annotations(std::as_bytes(std::span<const char>(atr)));
  return rec;
}

}  // namespace fedgaf
