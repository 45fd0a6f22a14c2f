#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedgaf/wire/channel.hpp"

namespace fedgaf {

// Wire message types, fixed forever within protocol version 1.
enum class MessageType : std::uint8_t {
  register_client = 1,
  global_model = 2,
  local_update = 3,
  done = 4,
};

inline constexpr std::size_t kFrameHeaderSize = 10;  // magic(4) ver(1) type(1) len(4)
inline constexpr std::uint32_t kMaxPayload = 256u * 1024u * 1024u;
inline constexpr std::uint8_t kProtocolVersion = 1;

struct Frame {
  MessageType type = MessageType::done;
  std::vector<std::byte> payload;
};

// Writes "FGAF", version, type and the u32 LE payload length, then the
// payload. Counts header + payload bytes into stats when given.
void send_frame(Channel& ch, MessageType type, std::span<const std::byte> payload,
                CommStats* stats = nullptr);

// Reads one frame. A clean close at a frame boundary throws ChannelClosed;
// a close mid-frame, a bad magic/version, an unknown type or an oversized
// length throw ProtocolError. No prefix shorter than header + payload ever
// yields a frame.
Frame recv_frame(Channel& ch, CommStats* stats = nullptr);

}  // namespace fedgaf
