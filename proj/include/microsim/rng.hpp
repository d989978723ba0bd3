#pragma once

#include <array>
#include <cstdint>

namespace microsim {

/// Philox4x32 block function (Salmon et al., SC'11), 10 rounds by default.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key,
                                        int rounds = 10);

/// What a draw is used for. Part of the counter so that distinct uses of the
/// same entity at the same hour never share random bits.
enum class Purpose : std::uint8_t {
  expose = 1,
  latent = 2,
  fatality = 3,
  place = 4,
  infector = 5,
  visit = 6,
  vaccine = 7,
  targeted = 8,
  seed = 9,
  synth = 10,
};

/// Counter-based stream keyed by (global seed, entity, purpose, hour).
///
/// Every draw is a pure function of the key and the number of draws already
/// taken from this stream object, so two entities can never perturb each
/// other's random numbers no matter which events execute.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t entity, Purpose purpose,
            std::uint32_t hour = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  /// Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  double normal() noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

}  // namespace microsim
