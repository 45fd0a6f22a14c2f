#include "fedgaf/wire/channel.hpp"

#include <condition_variable>
#include <mutex>
#include <vector>

#include "fedgaf/errors.hpp"

namespace fedgaf {

namespace {

// One direction of a loopback pair. Unbounded; close wakes waiters.
struct Pipe {
  std::mutex mutex;
  std::condition_variable cv;
  std::vector<std::byte> buf;
  std::size_t head = 0;
  bool closed = false;

  std::size_t available() const { return buf.size() - head; }

  void compact() {
    if (head > 0 && head == buf.size()) {
      buf.clear();
      head = 0;
    } else if (head > (1u << 20)) {
      buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(head));
      head = 0;
    }
  }
};

class LoopbackChannel final : public Channel {
 public:
  LoopbackChannel(std::shared_ptr<Pipe> rx, std::shared_ptr<Pipe> tx)
      : rx_(std::move(rx)), tx_(std::move(tx)) {}

  ~LoopbackChannel() override { close(); }

  std::size_t read(std::span<std::byte> dst) override {
    std::size_t filled = 0;
    std::unique_lock lock(rx_->mutex);
    while (filled < dst.size()) {
      if (rx_->available() == 0) {
        if (rx_->closed) return filled;
        if (timeout_.count() > 0) {
          // wait_until on the system clock maps onto pthread_cond_timedwait,
          // matching SO_RCVTIMEO semantics (one timeout per blocking read).
          const auto deadline = std::chrono::system_clock::now() + timeout_;
          if (!rx_->cv.wait_until(lock, deadline,
                                  [&] { return rx_->available() > 0 || rx_->closed; })) {
            throw TimeoutError("read timed out");
          }
        } else {
          rx_->cv.wait(lock, [&] { return rx_->available() > 0 || rx_->closed; });
        }
        continue;
      }
      const std::size_t n = std::min(dst.size() - filled, rx_->available());
      std::copy(rx_->buf.begin() + static_cast<std::ptrdiff_t>(rx_->head),
                rx_->buf.begin() + static_cast<std::ptrdiff_t>(rx_->head + n),
                dst.begin() + static_cast<std::ptrdiff_t>(filled));
      rx_->head += n;
      filled += n;
      rx_->compact();
    }
    return filled;
  }

  void write_all(std::span<const std::byte> src) override {
    std::lock_guard lock(tx_->mutex);
    if (tx_->closed) throw ChannelClosed("loopback channel closed");
    tx_->buf.insert(tx_->buf.end(), src.begin(), src.end());
    tx_->cv.notify_all();
  }

  void close() override {
    for (const auto& pipe : {rx_, tx_}) {
      std::lock_guard lock(pipe->mutex);
      pipe->closed = true;
      pipe->cv.notify_all();
    }
  }

  void set_read_timeout(std::chrono::milliseconds timeout) override {
    timeout_ = timeout;
  }

 private:
  std::shared_ptr<Pipe> rx_;
  std::shared_ptr<Pipe> tx_;
  std::chrono::milliseconds timeout_{0};
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> loopback_channel_pair() {
  auto a = std::make_shared<Pipe>();
  auto b = std::make_shared<Pipe>();
  return {std::make_unique<LoopbackChannel>(a, b),
          std::make_unique<LoopbackChannel>(b, a)};
}

}  // namespace fedgaf
