#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "fedgaf/wire/channel.hpp"

namespace fedgaf {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

// Parses "host:port"; host defaults to 0.0.0.0 when empty (":9000").
Endpoint parse_endpoint(const std::string& text);

class TcpListener {
 public:
  // Binds and listens on an IPv4 address. Port 0 picks an ephemeral port.
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();

  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<Channel> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

// Connects to host:port, retrying until the deadline (covers the race where
// clients start before the server is listening).
std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port,
                                     std::chrono::milliseconds retry_for =
                                         std::chrono::milliseconds(10000));

}  // namespace fedgaf
