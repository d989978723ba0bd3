#include <string>

#include "microsim/error.hpp"
#include "microsim/geography.hpp"

namespace microsim {

namespace {

constexpr std::uint32_t kSevenDigitMin = 1'000'000;
constexpr std::uint32_t kSevenDigitMax = 9'999'999;
constexpr std::uint64_t kSplit = 10'000'000;

bool seven_digits(std::uint64_t v) noexcept { return v >= kSevenDigitMin && v <= kSevenDigitMax; }

}  // namespace

std::uint64_t combine_coords(std::uint32_t east, std::uint32_t north) {
  if (!seven_digits(east) || !seven_digits(north)) {
    throw Error("coordinates must have seven digits: east " + std::to_string(east) + ", north " +
                std::to_string(north));
  }
  return static_cast<std::uint64_t>(east) * kSplit + north;
}

bool is_valid_combined(std::uint64_t combined) noexcept {
  return seven_digits(combined / kSplit) && seven_digits(combined % kSplit);
}

Coord split_coords(std::uint64_t combined) {
  if (!is_valid_combined(combined)) {
    throw Error("combined coordinate " + std::to_string(combined) +
                " is not two seven-digit halves");
  }
  return {static_cast<std::uint32_t>(combined / kSplit),
          static_cast<std::uint32_t>(combined % kSplit)};
}

std::uint32_t compress_coord(Coord c, Coord origin) {
  if (c.east < origin.east || c.north < origin.north) {
    throw Error("coordinate lies below the compression origin");
  }
  const std::uint32_t de = c.east - origin.east;
  const std::uint32_t dn = c.north - origin.north;
  if (de % kSquareMeters != 0 || dn % kSquareMeters != 0) {
    throw Error("coordinate offset is not a multiple of 100 m");
  }
  const std::uint32_t ce = de / kSquareMeters;
  const std::uint32_t cn = dn / kSquareMeters;
  if (ce > 0xFFFF || cn > 0xFFFF) throw Error("coordinate offset exceeds 16-bit cell range");
  return (ce << 16) | cn;
}

Coord decompress_coord(std::uint32_t packed, Coord origin) noexcept {
  return {origin.east + (packed >> 16) * kSquareMeters,
          origin.north + (packed & 0xFFFF) * kSquareMeters};
}

std::uint16_t region_of_square(Coord c) {
  if (!seven_digits(c.east) || !seven_digits(c.north)) {
    throw Error("region lookup needs seven-digit coordinates");
  }
  const std::uint32_t be = c.east / 100'000 - 10;
  const std::uint32_t bn = c.north / 100'000 - 10;
  return static_cast<std::uint16_t>(be * 90 + bn + 1);
}

}  // namespace microsim
