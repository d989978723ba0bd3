#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "microsim/actor_id.hpp"
#include "microsim/disease_profile.hpp"
#include "microsim/geography.hpp"
#include "microsim/member_list.hpp"
#include "microsim/records.hpp"

namespace microsim {

inline constexpr std::uint32_t kNoEvent = ~std::uint32_t{0};

struct Person {
  ActorId actor_id;
  ActorId home;
  ActorId workplace;           // none when unemployed and not in school
  ActorId transmission_site;   // where the last movement event put the person
  ActorId visit_site;          // care unit visited at visit_hour
  Hour visit_hour = kNever;
  InfectionCourse course;
  double vaccination_success = 0.0;
  std::uint64_t ind_id = 0;
  std::uint64_t fam_id = 0;
  std::uint32_t life = kNoEvent;
  std::uint16_t age = 0;
  std::uint16_t department = 0;
  std::uint16_t region = 0;
  std::uint8_t sex = 1;
  std::uint8_t disease_profile = 0;
  bool immune = false;
  bool deceased = false;
};

struct House {
  ActorId actor_id;
  ActorKind house_type = ActorKind::home;
  bool is_infected = false;
  std::uint16_t region = 0;
  std::uint16_t sni_kod = 0;
  std::uint32_t xy = 0;
  std::uint64_t register_id = 0;  // fam_id for homes, workplace_id otherwise
  MemberList members;
  std::uint32_t life = kNoEvent;
  /// Last transmission hour with nonzero combined hazard.
  Hour last_hazard_hour = kNever;
};

/// Side data of ER and DID houses, looked up by house id.
struct CareExtra {
  MemberList patients;
  MemberList visitors;
  std::uint32_t capacity = 0;
  std::uint32_t occupancy = 0;

  bool is_full() const noexcept { return occupancy >= capacity; }
};

struct PopulationOptions {
  /// Workplaces larger than this are split into departments of this size.
  std::uint16_t department_size = 20;
  std::uint32_t er_capacity = 50;
  std::uint32_t did_capacity = 50;
  std::uint16_t hospital_branch_code = 8511;
  /// Extra 20-slot chunks per care unit for patient and visitor lists.
  std::uint32_t care_chunk_headroom = 8;
};

/// Fixed-capacity vector: reserves once and refuses to grow past capacity.
template <class T>
class FixedPool {
 public:
  explicit FixedPool(std::size_t capacity = 0) { items_.reserve(capacity); }
  std::uint32_t push(T item, const char* what) {
    if (items_.size() == items_.capacity()) {
      throw PoolExhausted(std::string(what) + " pool exhausted: capacity " +
                          std::to_string(items_.capacity()) + ", at least " +
                          std::to_string(items_.capacity() + 1) + " required");
    }
    items_.push_back(std::move(item));
    return static_cast<std::uint32_t>(items_.size() - 1);
  }
  T& operator[](std::size_t i) noexcept { return items_[i]; }
  const T& operator[](std::size_t i) const noexcept { return items_[i]; }
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return items_.capacity(); }
  std::span<T> all() noexcept { return items_; }
  std::span<const T> all() const noexcept { return items_; }

 private:
  std::vector<T> items_;
};

/// Pooled persons and houses with their membership network. Entities are
/// never destroyed after loading; only member lists and flags change.
class Population {
 public:
  Population(std::size_t person_capacity, std::size_t house_capacity, std::size_t chunk_capacity);

  /// Builds the network from the three input files. Throws Error on
  /// inconsistent data (unknown squares or workplace references).
  static Population build(std::span<const PersonRecord> persons,
                          std::span<const WorkplaceRecord> workplaces, const GridIndex& grid,
                          const PopulationOptions& options);

  /// Chunk capacity needed for the given member-list sizes plus care headroom.
  static std::size_t required_chunks(std::span<const std::uint32_t> house_sizes, std::size_t care_units,
                                     std::uint32_t headroom_per_unit);

  ActorId add_person(Person p);
  ActorId init_home(std::uint64_t fam_id, std::uint32_t xy, std::uint16_t region);
  ActorId init_workplace(ActorKind kind, std::uint64_t workplace_id, std::uint32_t xy,
                         std::uint16_t region, std::uint16_t sni_kod);
  /// ER house with a CareExtra entry.
  ActorId init_akutmott(std::uint32_t xy, std::uint16_t region, std::uint32_t capacity);
  /// Infectious disease department with a CareExtra entry.
  ActorId init_inf_klinik(std::uint32_t xy, std::uint16_t region, std::uint32_t capacity);

  /// Adds a person to a home or workplace and, for workplaces, assigns
  /// the department from the insertion position.
  void connect(ActorId person, ActorId house, bool check_duplicate = true);
  /// Recomputes departments of every workplace member.
  void assign_departments(std::uint16_t department_size);

  Person& person(ActorId id) { return persons_[id.index()]; }
  const Person& person(ActorId id) const { return persons_[id.index()]; }
  House& house(ActorId id) { return houses_[id.index()]; }
  const House& house(ActorId id) const { return houses_[id.index()]; }

  std::span<Person> persons() noexcept { return persons_.all(); }
  std::span<const Person> persons() const noexcept { return persons_.all(); }
  std::span<House> houses() noexcept { return houses_.all(); }
  std::span<const House> houses() const noexcept { return houses_.all(); }

  CareExtra* care_extra(ActorId house);
  const CareExtra* care_extra(ActorId house) const;

  ChunkPool& chunks() noexcept { return chunks_; }
  const ChunkPool& chunks() const noexcept { return chunks_; }

  const std::vector<CareUnit>& er_units() const noexcept { return er_units_; }
  const std::vector<CareUnit>& did_units() const noexcept { return did_units_; }
  /// Record the coordinates of care units (used by build()).
  void register_care_unit(ActorId house, Coord at);

  std::uint16_t department_size() const noexcept { return department_size_; }

  std::size_t memory_bytes() const noexcept;

 private:
  FixedPool<Person> persons_;
  FixedPool<House> houses_;
  ChunkPool chunks_;
  std::unordered_map<ActorId, CareExtra> care_;
  std::vector<CareUnit> er_units_;
  std::vector<CareUnit> did_units_;
  std::uint16_t department_size_ = 20;
};

ActorKind house_kind_for(WorkplaceType t) noexcept;

}  // namespace microsim
