#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>

namespace fedgaf {

// An ordered, reliable byte stream. One channel end is owned by one session;
// close() may be called from another thread and wakes a blocked read.
class Channel {
 public:
  virtual ~Channel() = default;

  // Blocks until dst is filled. Returns the count actually read, which is
  // smaller only if the peer closed mid-read (0 = closed before any byte).
  // Throws TimeoutError when a read timeout is set and expires.
  virtual std::size_t read(std::span<std::byte> dst) = 0;

  // Writes the whole buffer; throws ChannelClosed if the peer is gone.
  virtual void write_all(std::span<const std::byte> src) = 0;

  virtual void close() = 0;

  // Zero disables the timeout.
  virtual void set_read_timeout(std::chrono::milliseconds timeout) = 0;
};

// Snapshot of the counters, comparable across runs.
struct CommTotals {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::array<std::uint64_t, 4> frames_sent{};      // indexed by MessageType - 1
  std::array<std::uint64_t, 4> frames_received{};

  bool operator==(const CommTotals&) const = default;
};

// Frame-level accounting (header + payload bytes; transport overhead is not
// counted). Safe to update from concurrent sessions.
struct CommStats {
  std::atomic<std::uint64_t> bytes_sent{0};
  std::atomic<std::uint64_t> bytes_received{0};
  std::array<std::atomic<std::uint64_t>, 4> frames_sent{};
  std::array<std::atomic<std::uint64_t>, 4> frames_received{};

  CommTotals totals() const {
    CommTotals t;
    t.bytes_sent = bytes_sent.load();
    t.bytes_received = bytes_received.load();
    for (int i = 0; i < 4; ++i) {
      t.frames_sent[i] = frames_sent[i].load();
      t.frames_received[i] = frames_received[i].load();
    }
    return t;
  }
};

// In-process channel pair with the same framing and accounting semantics as
// TCP. Unbounded buffering; close on either end wakes both sides.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> loopback_channel_pair();

}  // namespace fedgaf
