#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace microsim {

/// Simulation time in whole hours since the start of day 0.
using Hour = std::int32_t;

inline constexpr Hour kHoursPerDay = 24;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or stream. `position()` is a 1-based line number for
/// text formats and a byte offset for binary formats.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t position = 0)
      : Error(what), position_(position) {}
  std::uint64_t position() const noexcept { return position_; }

 private:
  std::uint64_t position_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A fixed-capacity pool ran out of room. The message names the required size.
class PoolExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace microsim
