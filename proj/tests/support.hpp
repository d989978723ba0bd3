#pragma once

#include <cstdint>
#include <vector>

#include "microsim/geography.hpp"
#include "microsim/harness.hpp"
#include "microsim/records.hpp"

namespace testing {

using namespace microsim;

/// Hand-built world on one row of squares: square i sits at
/// (1500000 + 100 i, 6500000).
struct World {
  std::vector<PersonRecord> persons;
  std::vector<WorkplaceRecord> workplaces;
  std::uint32_t squares = 0;

  static std::uint64_t square(std::uint32_t i) { return combine_coords(1'500'000 + 100 * i, 6'500'000); }

  std::uint32_t add_square() { return squares++; }

  std::uint64_t add_person(std::uint64_t fam_id, std::uint32_t sq, std::uint64_t workplace_id = 0,
                           std::uint16_t age = 30) {
    PersonRecord p;
    p.ind_id = persons.size() + 1;
    p.fam_id = fam_id;
    p.age = age;
    p.sex = static_cast<std::uint8_t>(1 + persons.size() % 2);
    p.dwelling_square = square(sq);
    p.workplace_id = workplace_id;
    p.ind_municipality = 1;
    persons.push_back(p);
    if (workplace_id != 0) {
      for (auto& w : workplaces) {
        if (w.workplace_id == workplace_id) ++w.no_of_employees;
      }
    }
    return p.ind_id;
  }

  void add_workplace(std::uint64_t id, std::uint32_t sq, std::uint16_t branch = 100,
                     WorkplaceType type = WorkplaceType::workplace) {
    WorkplaceRecord w;
    w.workplace_id = id;
    w.wp_square = square(sq);
    w.branch_code = branch;
    w.wp_mun = 1;
    w.wp_type = type;
    workplaces.push_back(w);
  }

  LoadedData data(const DiseaseProfile& profile, const PopulationOptions& options = {}) const {
    LoadedData d;
    d.persons = persons;
    d.workplaces = workplaces;
    for (std::uint32_t i = 0; i < squares; ++i) {
      const Coord c = split_coords(square(i));
      d.xy.records.push_back({i, c.east, c.north});
    }
    d.grid = GridIndex::build(d.xy.records);
    d.xy.origin = d.grid.origin();
    const Population pop = Population::build(d.persons, d.workplaces, d.grid, options);
    if (!pop.er_units().empty()) d.care = precompute_care_map(d.grid, pop.er_units(), pop.did_units());
    d.profile = profile;
    return d;
  }
};

inline RunConfig config_with(const PopulationOptions& options, const SimulationConfig& sim) {
  RunConfig c;
  c.population = options;
  c.sim = sim;
  return c;
}

}  // namespace testing
