#include <algorithm>
#include <string>

#include "microsim/error.hpp"
#include "microsim/geography.hpp"

namespace microsim {

namespace {

std::uint64_t key_of(Coord c) {
  return (static_cast<std::uint64_t>(c.east) << 32) | c.north;
}

}  // namespace

GridIndex GridIndex::build(std::span<const XYRecord> records) {
  GridIndex g;
  g.coords_.resize(records.size());
  std::vector<bool> seen(records.size(), false);
  g.lookup_.reserve(records.size());
  Coord origin{~std::uint32_t{0}, ~std::uint32_t{0}};
  for (const auto& r : records) {
    if (r.xy_index >= records.size() || seen[r.xy_index]) {
      throw Error("xy_index " + std::to_string(r.xy_index) + " is out of range or repeated; indices must be 0.." +
                  std::to_string(records.size()) + "-1");
    }
    seen[r.xy_index] = true;
    const Coord c{r.east, r.north};
    if (!g.lookup_.emplace(key_of(c), r.xy_index).second) {
      throw Error("duplicate grid square (" + std::to_string(r.east) + ", " +
                  std::to_string(r.north) + ")");
    }
    g.coords_[r.xy_index] = c;
    origin.east = std::min(origin.east, c.east);
    origin.north = std::min(origin.north, c.north);
  }
  g.origin_ = records.empty() ? Coord{} : origin;
  return g;
}

std::optional<std::uint32_t> GridIndex::find(Coord c) const {
  const auto it = lookup_.find(key_of(c));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> GridIndex::find_combined(std::uint64_t combined) const {
  if (!is_valid_combined(combined)) return std::nullopt;
  return find(split_coords(combined));
}

}  // namespace microsim
