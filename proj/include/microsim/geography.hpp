#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "microsim/actor_id.hpp"
#include "microsim/error.hpp"
#include "microsim/records.hpp"

namespace microsim {

inline constexpr std::uint32_t kSquareMeters = 100;

/// Lower-left corner of a 100 m grid square, in meters.
struct Coord {
  std::uint32_t east = 0;
  std::uint32_t north = 0;
  friend constexpr bool operator==(Coord, Coord) = default;
};

/// east * 10^7 + north. Both halves must have exactly seven digits.
std::uint64_t combine_coords(std::uint32_t east, std::uint32_t north);
inline std::uint64_t combine_coords(Coord c) { return combine_coords(c.east, c.north); }
/// Inverse of combine_coords; throws Error unless `combined` has 14 digits
/// with a seven-digit northern half.
Coord split_coords(std::uint64_t combined);
bool is_valid_combined(std::uint64_t combined) noexcept;

/// Packs ((east-east0)/100) << 16 | ((north-north0)/100).
std::uint32_t compress_coord(Coord c, Coord origin);
Coord decompress_coord(std::uint32_t packed, Coord origin) noexcept;

/// Coarse 100 km administrative block used as the municipality code of
/// synthetic data; always in 1..8100 for valid coordinates.
std::uint16_t region_of_square(Coord c);

/// Dense xy-index <-> coordinate table.
class GridIndex {
 public:
  GridIndex() = default;
  /// Requires dense indices 0..n-1 and unique coordinates.
  static GridIndex build(std::span<const XYRecord> records);

  std::size_t size() const noexcept { return coords_.size(); }
  Coord coord(std::uint32_t xy_index) const { return coords_.at(xy_index); }
  std::optional<std::uint32_t> find(Coord c) const;
  std::optional<std::uint32_t> find_combined(std::uint64_t combined) const;
  /// Minimum east and north over all squares.
  Coord origin() const noexcept { return origin_; }
  std::uint32_t max_index() const noexcept {
    return coords_.empty() ? 0 : static_cast<std::uint32_t>(coords_.size() - 1);
  }

 private:
  std::vector<Coord> coords_;
  std::unordered_map<std::uint64_t, std::uint32_t> lookup_;
  Coord origin_{};
};

struct CareUnit {
  ActorId house;
  Coord at;
};

/// Closest unit by squared Euclidean distance between square corners; ties
/// go to the lowest house id. Throws Error on an empty list.
ActorId nearest_care_unit(Coord square, std::span<const CareUnit> units);

/// Care units sorted by house id in structure-of-arrays form, queried
/// through the dispatched nearest-point kernel.
class CareUnitIndex {
 public:
  explicit CareUnitIndex(std::span<const CareUnit> units);
  ActorId nearest(Coord square) const;
  bool empty() const noexcept { return ids_.empty(); }

 private:
  std::vector<ActorId> ids_;
  std::vector<double> east_;
  std::vector<double> north_;
};

struct CareAssignment {
  ActorId er;
  ActorId did;
  friend bool operator==(const CareAssignment&, const CareAssignment&) = default;
};

/// xy-index -> (nearest ER, nearest DID).
class CareUnitMap {
 public:
  CareUnitMap() = default;
  explicit CareUnitMap(std::vector<CareAssignment> entries) : entries_(std::move(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const CareAssignment& at(std::uint32_t xy_index) const { return entries_.at(xy_index); }
  std::span<const CareAssignment> entries() const noexcept { return entries_; }

  friend bool operator==(const CareUnitMap&, const CareUnitMap&) = default;

 private:
  std::vector<CareAssignment> entries_;
};

CareUnitMap precompute_care_map(const GridIndex& grid, std::span<const CareUnit> er_units,
                                std::span<const CareUnit> did_units);

void write_care_map(std::ostream& out, const CareUnitMap& map);
CareUnitMap read_care_map(std::istream& in);

}  // namespace microsim
