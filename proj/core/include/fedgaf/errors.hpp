#pragma once

#include <stdexcept>

namespace fedgaf {

// Exception taxonomy. Everything thrown by the library derives from Error;
// the subclass names the failure domain.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SerializeError : public Error {
 public:
  using Error::Error;
};

class DeserializeError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class AggregationError : public Error {
 public:
  using Error::Error;
};

class RoundAbortError : public Error {
 public:
  using Error::Error;
};

class ClientAbortError : public Error {
 public:
  using Error::Error;
};

class ChannelClosed : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fedgaf
