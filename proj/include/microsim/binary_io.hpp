#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "microsim/error.hpp"

namespace microsim::binio {

/// Every binary file starts with an 8-byte magic, a u32 version and a u64
/// record count, all little-endian.
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 8 + 4 + 8;

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void raw(std::string_view s) { bytes_.append(s); }
  void header(std::string_view magic, std::uint64_t count) {
    raw(magic);
    u32(kVersion);
    u64(count);
  }
  const std::string& bytes() const noexcept { return bytes_; }
  void flush_to(std::ostream& out) const {
    out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
    if (!out) throw Error("binary write failed");
  }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(std::istream& in)
      : bytes_(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::size_t size() const noexcept { return bytes_.size(); }
  std::size_t position() const noexcept { return pos_; }

  /// Validates magic/version and the total byte count; returns the record count.
  std::uint64_t header(std::string_view magic, std::string_view what, std::size_t extra_header,
                       std::size_t row_bytes) {
    if (bytes_.size() < kHeaderBytes + extra_header) {
      throw FormatError(std::string(what) + ": truncated header, expected at least " +
                            std::to_string(kHeaderBytes + extra_header) + " bytes, got " +
                            std::to_string(bytes_.size()),
                        bytes_.size());
    }
    if (std::memcmp(bytes_.data(), magic.data(), 8) != 0) {
      throw FormatError(std::string(what) + ": bad magic", 0);
    }
    pos_ = 8;
    const std::uint32_t version = u32();
    if (version != kVersion) {
      throw FormatError(std::string(what) + ": unsupported version " + std::to_string(version) +
                            " (expected " + std::to_string(kVersion) + ")",
                        8);
    }
    const std::uint64_t count = u64();
    const std::uint64_t expected = kHeaderBytes + extra_header + count * row_bytes;
    if (bytes_.size() != expected) {
      throw FormatError(std::string(what) + (bytes_.size() < expected ? ": truncated" : ": trailing data") +
                            ", expected " + std::to_string(expected) + " bytes, got " +
                            std::to_string(bytes_.size()),
                        bytes_.size());
    }
    return count;
  }

 private:
  std::uint64_t get(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += n;
    return v;
  }
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace microsim::binio
