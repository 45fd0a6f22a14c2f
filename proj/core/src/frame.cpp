#include "fedgaf/wire/frame.hpp"

#include <string>

#include "fedgaf/errors.hpp"
#include "fedgaf/wire/bytes.hpp"

namespace fedgaf {

namespace {
constexpr char kMagic[4] = {'F', 'G', 'A', 'F'};

bool known_type(std::uint8_t t) { return t >= 1 && t <= 4; }
}  // namespace

void send_frame(Channel& ch, MessageType type, std::span<const std::byte> payload,
                CommStats* stats) {
  if (payload.size() > kMaxPayload) {
    throw ProtocolError("frame payload exceeds " + std::to_string(kMaxPayload) + " bytes");
  }
  ByteWriter header;
  header.raw({kMagic, 4});
  header.u8(kProtocolVersion);
  header.u8(static_cast<std::uint8_t>(type));
  header.u32(static_cast<std::uint32_t>(payload.size()));
  ch.write_all(header.data());
  if (!payload.empty()) ch.write_all(payload);
  if (stats) {
    stats->bytes_sent += kFrameHeaderSize + payload.size();
    stats->frames_sent[static_cast<int>(type) - 1] += 1;
  }
}

Frame recv_frame(Channel& ch, CommStats* stats) {
  std::byte header[kFrameHeaderSize];
  const std::size_t got = ch.read(header);
  if (got == 0) throw ChannelClosed("channel closed");
  if (got < kFrameHeaderSize) throw ProtocolError("channel closed mid-header");

  ByteReader r(std::span<const std::byte>(header, kFrameHeaderSize));
  for (char expected : kMagic) {
    if (static_cast<char>(r.u8()) != expected) throw ProtocolError("bad frame magic");
  }
  const std::uint8_t version = r.u8();
  if (version != kProtocolVersion) {
    throw ProtocolError("unsupported protocol version " + std::to_string(version));
  }
  const std::uint8_t type = r.u8();
  if (!known_type(type)) {
    throw ProtocolError("unknown message type " + std::to_string(type));
  }
  const std::uint32_t len = r.u32();
  if (len > kMaxPayload) throw ProtocolError("frame payload length out of bounds");

  Frame frame;
  frame.type = static_cast<MessageType>(type);
  frame.payload.resize(len);
  if (len > 0) {
    const std::size_t body = ch.read(frame.payload);
    if (body < len) throw ProtocolError("channel closed mid-payload");
  }
  if (stats) {
    stats->bytes_received += kFrameHeaderSize + len;
    stats->frames_received[type - 1] += 1;
  }
  return frame;
}

}  // namespace fedgaf
