#include "fedgaf/wire/tcp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "fedgaf/errors.hpp"

namespace fedgaf {

namespace {

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

in_addr resolve_ipv4(const std::string& host) {
  in_addr addr{};
  const std::string name = host.empty() || host == "localhost" ? "127.0.0.1" : host;
  if (name == "*" || name == "0.0.0.0") {
    addr.s_addr = htonl(INADDR_ANY);
    return addr;
  }
  if (inet_pton(AF_INET, name.c_str(), &addr) != 1) {
    throw ConfigError("not an IPv4 address: " + host);
  }
  return addr;
}

class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {}

  ~TcpChannel() override {
    close();
    if (fd_ >= 0) ::close(fd_);
  }

  std::size_t read(std::span<std::byte> dst) override {
    std::size_t filled = 0;
    while (filled < dst.size()) {
      const ssize_t n = ::recv(fd_, dst.data() + filled, dst.size() - filled, 0);
      if (n > 0) {
        filled += static_cast<std::size_t>(n);
        continue;
      }
      if (n == 0) return filled;  // orderly shutdown
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw TimeoutError("read timed out");
      throw IoError(errno_text("recv"));
    }
    return filled;
  }

  void write_all(std::span<const std::byte> src) override {
    std::size_t sent = 0;
    while (sent < src.size()) {
      const ssize_t n = ::send(fd_, src.data() + sent, src.size() - sent, MSG_NOSIGNAL);
      if (n >= 0) {
        sent += static_cast<std::size_t>(n);
        continue;
      }
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET) {
        throw ChannelClosed("peer closed the connection");
      }
      throw IoError(errno_text("send"));
    }
  }

  // shutdown() rather than close() so a concurrent blocked read wakes up
  // safely; the descriptor itself is released in the destructor.
  void close() override {
    if (!closed_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
  }

  void set_read_timeout(std::chrono::milliseconds timeout) override {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  }

 private:
  int fd_;
  std::atomic<bool> closed_{false};
};

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw ConfigError("expected host:port, got '" + text + "'");
  Endpoint ep;
  ep.host = text.substr(0, colon);
  const std::string port_text = text.substr(colon + 1);
  try {
    const int port = std::stoi(port_text);
    if (port < 0 || port > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw ConfigError("bad port in endpoint '" + text + "'");
  }
  return ep;
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw IoError(errno_text("socket"));
  const int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr = resolve_ipv4(host.empty() ? "0.0.0.0" : host);
  addr.sin_port = htons(port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string msg = errno_text("bind");
    ::close(fd_);
    fd_ = -1;
    throw IoError(msg);
  }
  if (::listen(fd_, 16) != 0) {
    const std::string msg = errno_text("listen");
    ::close(fd_);
    fd_ = -1;
    throw IoError(msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) == 0) {
    port_ = ntohs(bound.sin_port);
  } else {
    port_ = port;
  }
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      const int one = 1;
      setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return std::make_unique<TcpChannel>(fd);
    }
    if (errno == EINTR) continue;
    throw IoError(errno_text("accept"));
  }
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port,
                                     std::chrono::milliseconds retry_for) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr = resolve_ipv4(host);
  addr.sin_port = htons(port);

  const auto deadline = std::chrono::steady_clock::now() + retry_for;
  for (;;) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw IoError(errno_text("socket"));
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) {
      const int one = 1;
      setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return std::make_unique<TcpChannel>(fd);
    }
    const int err = errno;
    ::close(fd);
    if (err == EINTR) continue;
    if ((err == ECONNREFUSED || err == ETIMEDOUT) &&
        std::chrono::steady_clock::now() < deadline) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      continue;
    }
    errno = err;
    throw IoError(errno_text("connect"));
  }
}

}  // namespace fedgaf
