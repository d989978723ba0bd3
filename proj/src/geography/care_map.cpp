#include <algorithm>
#include <numeric>

#include "microsim/binary_io.hpp"
#include "microsim/error.hpp"
#include "microsim/geography.hpp"
#include "microsim/kernels.hpp"

namespace microsim {

namespace {

constexpr std::string_view kCareMagic{"MSIMCARE", 8};
constexpr std::size_t kCareRowBytes = 4 + 8 + 8;

}  // namespace

CareUnitIndex::CareUnitIndex(std::span<const CareUnit> units) {
  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return units[a].house < units[b].house; });
  ids_.reserve(units.size());
  east_.reserve(units.size());
  north_.reserve(units.size());
  for (std::size_t i : order) {
    ids_.push_back(units[i].house);
    east_.push_back(units[i].at.east);
    north_.push_back(units[i].at.north);
  }
}

ActorId CareUnitIndex::nearest(Coord square) const {
  if (ids_.empty()) throw Error("nearest care unit requested from an empty unit list");
  return ids_[kernels::nearest(square.east, square.north, east_, north_)];
}

ActorId nearest_care_unit(Coord square, std::span<const CareUnit> units) {
  return CareUnitIndex(units).nearest(square);
}

CareUnitMap precompute_care_map(const GridIndex& grid, std::span<const CareUnit> er_units,
                                std::span<const CareUnit> did_units) {
  const CareUnitIndex er(er_units);
  const CareUnitIndex did(did_units);
  std::vector<CareAssignment> entries(grid.size());
  for (std::uint32_t i = 0; i < grid.size(); ++i) {
    const Coord c = grid.coord(i);
    entries[i] = {er.nearest(c), did.nearest(c)};
  }
  return CareUnitMap(std::move(entries));
}

void write_care_map(std::ostream& out, const CareUnitMap& map) {
  binio::Writer w;
  w.header(kCareMagic, map.size());
  for (std::uint32_t i = 0; i < map.size(); ++i) {
    w.u32(i);
    w.u64(map.at(i).er.value());
    w.u64(map.at(i).did.value());
  }
  w.flush_to(out);
}

CareUnitMap read_care_map(std::istream& in) {
  binio::Reader r(in);
  const std::uint64_t n = r.header(kCareMagic, "care-map file", 0, kCareRowBytes);
  std::vector<CareAssignment> entries(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t xy = r.u32();
    if (xy != i) {
      throw FormatError("care-map file: row " + std::to_string(i) + " has xy_index " +
                            std::to_string(xy),
                        r.position());
    }
    entries[i].er = ActorId{r.u64()};
    entries[i].did = ActorId{r.u64()};
  }
  return CareUnitMap(std::move(entries));
}

}  // namespace microsim
