#include "microsim/population.hpp"

#include <unordered_map>

#include "microsim/error.hpp"

namespace microsim {

ActorKind house_kind_for(WorkplaceType t) noexcept {
  switch (t) {
    case WorkplaceType::daycare: return ActorKind::daycare;
    case WorkplaceType::school:
    case WorkplaceType::other_school: return ActorKind::school;
    case WorkplaceType::college: return ActorKind::college;
    case WorkplaceType::workplace: return ActorKind::workplace;
  }
  return ActorKind::workplace;
}

Population::Population(std::size_t person_capacity, std::size_t house_capacity,
                       std::size_t chunk_capacity)
    : persons_(person_capacity), houses_(house_capacity), chunks_(chunk_capacity) {}

std::size_t Population::required_chunks(std::span<const std::uint32_t> house_sizes,
                                        std::size_t care_units, std::uint32_t headroom_per_unit) {
  std::size_t total = care_units * headroom_per_unit;
  for (std::uint32_t s : house_sizes) total += MemberList::chunks_for(s);
  return total;
}

ActorId Population::add_person(Person p) {
  const auto id = ActorId::encode(ActorKind::person, persons_.size());
  p.actor_id = id;
  persons_.push(std::move(p), "person");
  return id;
}

ActorId Population::init_home(std::uint64_t fam_id, std::uint32_t xy, std::uint16_t region) {
  House h;
  h.actor_id = ActorId::encode(ActorKind::home, houses_.size());
  h.house_type = ActorKind::home;
  h.register_id = fam_id;
  h.xy = xy;
  h.region = region;
  const auto id = h.actor_id;
  houses_.push(std::move(h), "house");
  return id;
}

ActorId Population::init_workplace(ActorKind kind, std::uint64_t workplace_id, std::uint32_t xy,
                                   std::uint16_t region, std::uint16_t sni_kod) {
  if (kind == ActorKind::person || kind == ActorKind::home || ActorId::encode(kind, 0).is_care_unit()) {
    throw Error("init_workplace needs a workplace or school kind");
  }
  House h;
  h.actor_id = ActorId::encode(kind, houses_.size());
  h.house_type = kind;
  h.register_id = workplace_id;
  h.xy = xy;
  h.region = region;
  h.sni_kod = sni_kod;
  const auto id = h.actor_id;
  houses_.push(std::move(h), "house");
  return id;
}

ActorId Population::init_akutmott(std::uint32_t xy, std::uint16_t region, std::uint32_t capacity) {
  House h;
  h.actor_id = ActorId::encode(ActorKind::er, houses_.size());
  h.house_type = ActorKind::er;
  h.xy = xy;
  h.region = region;
  const auto id = h.actor_id;
  houses_.push(std::move(h), "house");
  care_.emplace(id, CareExtra{{}, {}, capacity, 0});
  return id;
}

ActorId Population::init_inf_klinik(std::uint32_t xy, std::uint16_t region, std::uint32_t capacity) {
  House h;
  h.actor_id = ActorId::encode(ActorKind::did, houses_.size());
  h.house_type = ActorKind::did;
  h.xy = xy;
  h.region = region;
  const auto id = h.actor_id;
  houses_.push(std::move(h), "house");
  care_.emplace(id, CareExtra{{}, {}, capacity, 0});
  return id;
}

void Population::connect(ActorId person_id, ActorId house_id, bool check_duplicate) {
  House& h = house(house_id);
  Person& p = person(person_id);
  if (check_duplicate) {
    h.members.add(person_id, chunks_);
  } else {
    h.members.add_unchecked(person_id, chunks_);
  }
  if (house_id.is_home()) {
    p.home = house_id;
  } else if (!house_id.is_care_unit()) {
    p.workplace = house_id;
  }
}

void Population::assign_departments(std::uint16_t department_size) {
  department_size_ = department_size;
  for (House& h : houses_.all()) {
    if (h.actor_id.is_home() || h.actor_id.is_care_unit()) continue;
    const bool split = h.members.size() > department_size;
    std::uint32_t pos = 0;
    h.members.for_each(chunks_, [&](ActorId m) {
      persons_[m.index()].department = split ? static_cast<std::uint16_t>(pos / department_size) : 0;
      ++pos;
    });
  }
}

CareExtra* Population::care_extra(ActorId house_id) {
  const auto it = care_.find(house_id);
  return it == care_.end() ? nullptr : &it->second;
}

const CareExtra* Population::care_extra(ActorId house_id) const {
  const auto it = care_.find(house_id);
  return it == care_.end() ? nullptr : &it->second;
}

void Population::register_care_unit(ActorId house_id, Coord at) {
  if (house_id.kind() == ActorKind::er) {
    er_units_.push_back({house_id, at});
  } else if (house_id.kind() == ActorKind::did) {
    did_units_.push_back({house_id, at});
  } else {
    throw Error("register_care_unit needs an ER or DID house");
  }
}

std::size_t Population::memory_bytes() const noexcept {
  return persons_.capacity() * sizeof(Person) + houses_.capacity() * sizeof(House) +
         chunks_.memory_bytes() +
         care_.size() * (sizeof(std::pair<ActorId, CareExtra>) + 2 * sizeof(void*)) +
         care_.bucket_count() * sizeof(void*) +
         (er_units_.capacity() + did_units_.capacity()) * sizeof(CareUnit);
}

Population Population::build(std::span<const PersonRecord> persons,
                             std::span<const WorkplaceRecord> workplaces, const GridIndex& grid,
                             const PopulationOptions& options) {
  if (options.department_size == 0) throw ConfigError("department_size must be positive");

  std::unordered_map<std::uint64_t, std::uint32_t> home_of_family;
  home_of_family.reserve(persons.size());
  std::vector<std::uint32_t> home_sizes;
  std::vector<std::uint32_t> first_member;
  for (std::uint32_t i = 0; i < persons.size(); ++i) {
    const auto [it, inserted] =
        home_of_family.try_emplace(persons[i].fam_id, static_cast<std::uint32_t>(home_sizes.size()));
    if (inserted) {
      home_sizes.push_back(0);
      first_member.push_back(i);
    }
    ++home_sizes[it->second];
  }

  std::unordered_map<std::uint64_t, std::uint32_t> workplace_index;
  workplace_index.reserve(workplaces.size());
  std::size_t hospitals = 0;
  for (std::uint32_t w = 0; w < workplaces.size(); ++w) {
    if (!workplace_index.emplace(workplaces[w].workplace_id, w).second) {
      throw Error("workplacefile lists workplace " + std::to_string(workplaces[w].workplace_id) + " twice");
    }
    if (workplaces[w].wp_type == WorkplaceType::workplace &&
        workplaces[w].branch_code == options.hospital_branch_code) {
      ++hospitals;
    }
  }
  std::vector<std::uint32_t> workplace_sizes(workplaces.size(), 0);
  for (const auto& p : persons) {
    if (p.workplace_id == 0) continue;
    const auto it = workplace_index.find(p.workplace_id);
    if (it == workplace_index.end()) {
      throw Error("person " + std::to_string(p.ind_id) + " references unknown workplace " +
                  std::to_string(p.workplace_id));
    }
    ++workplace_sizes[it->second];
  }
  for (std::size_t w = 0; w < workplaces.size(); ++w) {
    if (workplace_sizes[w] != workplaces[w].no_of_employees) {
      throw Error("workplace " + std::to_string(workplaces[w].workplace_id) + " lists " +
                  std::to_string(workplaces[w].no_of_employees) + " employees but " +
                  std::to_string(workplace_sizes[w]) + " persons reference it");
    }
  }

  std::vector<std::uint32_t> sizes = home_sizes;
  sizes.insert(sizes.end(), workplace_sizes.begin(), workplace_sizes.end());
  const std::uint32_t unit_headroom =
      static_cast<std::uint32_t>(MemberList::chunks_for(std::max(options.er_capacity, options.did_capacity)) * 3) +
      options.care_chunk_headroom;
  const std::size_t chunk_capacity = required_chunks(sizes, 2 * hospitals, unit_headroom);

  Population pop(persons.size(), home_sizes.size() + workplaces.size() + 2 * hospitals, chunk_capacity);
  pop.department_size_ = options.department_size;

  auto square_index = [&](std::uint64_t combined, const std::string& who) {
    const auto xy = grid.find_combined(combined);
    if (!xy) throw Error(who + " is located at square " + std::to_string(combined) + " missing from the xyfile");
    return *xy;
  };

  for (std::size_t h = 0; h < home_sizes.size(); ++h) {
    const auto& first = persons[first_member[h]];
    pop.init_home(first.fam_id, square_index(first.dwelling_square, "family " + std::to_string(first.fam_id)),
                  first.ind_municipality);
  }
  std::vector<ActorId> workplace_ids(workplaces.size());
  for (std::size_t w = 0; w < workplaces.size(); ++w) {
    const auto& rec = workplaces[w];
    workplace_ids[w] = pop.init_workplace(
        house_kind_for(rec.wp_type), rec.workplace_id,
        square_index(rec.wp_square, "workplace " + std::to_string(rec.workplace_id)), rec.wp_mun,
        rec.branch_code);
  }
  for (std::size_t w = 0; w < workplaces.size(); ++w) {
    const auto& rec = workplaces[w];
    if (rec.wp_type != WorkplaceType::workplace || rec.branch_code != options.hospital_branch_code) continue;
    const std::uint32_t xy = pop.house(workplace_ids[w]).xy;
    const Coord at = grid.coord(xy);
    pop.register_care_unit(pop.init_akutmott(xy, rec.wp_mun, options.er_capacity), at);
    pop.register_care_unit(pop.init_inf_klinik(xy, rec.wp_mun, options.did_capacity), at);
  }

  for (const auto& rec : persons) {
    Person p;
    p.ind_id = rec.ind_id;
    p.fam_id = rec.fam_id;
    p.age = rec.age;
    p.sex = rec.sex;
    p.region = rec.ind_municipality;
    const ActorId pid = pop.add_person(std::move(p));
    pop.connect(pid, ActorId::encode(ActorKind::home, home_of_family.at(rec.fam_id)), false);
    if (rec.workplace_id != 0) {
      pop.connect(pid, workplace_ids[workplace_index.at(rec.workplace_id)], false);
    }
    Person& added = pop.person(pid);
    added.transmission_site = added.home;
  }
  pop.assign_departments(options.department_size);
  return pop;
}

}  // namespace microsim
