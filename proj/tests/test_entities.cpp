#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "microsim/population.hpp"
#include "microsim/rng.hpp"

using namespace microsim;

namespace {

constexpr ActorKind kAllKinds[] = {ActorKind::person,  ActorKind::home,    ActorKind::workplace,
                                   ActorKind::daycare, ActorKind::school,  ActorKind::college,
                                   ActorKind::er,      ActorKind::did};

DiseaseProfile two_stage() {
  DiseaseProfile p;
  p.latent.family = LatentFamily::constant;
  p.latent.hours = 10;
  DiseaseStage a;
  a.duration_hours = 5;
  a.infectiousness = 0.3;
  DiseaseStage b;
  b.duration_hours = 7;
  b.infectiousness = 0.1;
  b.fatality_prob = 0.5;
  p.stages = {a, b};
  return p;
}

// Cumulative-sum reference for the disease level.
DiseaseLevel level_oracle(const DiseaseProfile& p, const InfectionCourse& c, Hour now) {
  if (!c.infected() || now < c.infected_at) return {};
  std::vector<Hour> bounds{c.infected_at + c.latent_hours};
  for (const auto& s : p.stages) bounds.push_back(bounds.back() + s.duration_hours);
  if (now < bounds[0]) return {HostState::latent, -1, 0.0};
  const int last = c.death_stage >= 0 ? c.death_stage : static_cast<int>(p.stages.size()) - 1;
  for (int s = 0; s <= last; ++s) {
    if (now < bounds[s + 1]) return {HostState::infectious, s, p.stages[s].infectiousness};
  }
  return {c.death_stage >= 0 ? HostState::deceased : HostState::recovered, -1, 0.0};
}

}  // namespace

TEST_SUITE("entities") {
  TEST_CASE("actor ids roundtrip every kind") {
    for (ActorKind k : kAllKinds) {
      for (std::uint64_t idx : {std::uint64_t{0}, std::uint64_t{1}, std::uint64_t{123456789}, ActorId::kIndexMask}) {
        const ActorId id = ActorId::encode(k, idx);
        const auto d = decode_actor_id(id);
        CHECK(d.kind == k);
        CHECK(d.index == idx);
        CHECK(kind_from_name(kind_name(k)) == k);
      }
    }
    CHECK_THROWS_AS(ActorId::encode(ActorKind::home, ActorId::kIndexMask + 1), Error);
    CHECK_THROWS_AS(kind_from_name("castle"), Error);
  }

  TEST_CASE("classification predicates partition the kinds") {
    for (ActorKind k : kAllKinds) {
      const ActorId id = ActorId::encode(k, 42);
      const int hits = id.is_person() + id.is_home() + id.is_workplace() + id.is_school_like() + id.is_care_unit();
      CHECK(hits == 1);
      CHECK(id.is_school_like() == (k == ActorKind::daycare || k == ActorKind::school || k == ActorKind::college));
      CHECK(id.is_care_unit() == (k == ActorKind::er || k == ActorKind::did));
    }
    CHECK_FALSE(ActorId::none().is_care_unit());
  }

  TEST_CASE("unknown tags are rejected") {
    for (std::uint8_t tag : {3, 7, 10, 11, 12, 13, 14, 15}) {
      CHECK_FALSE(is_valid_kind_tag(tag));
      CHECK_THROWS_AS(decode_actor_id(ActorId{std::uint64_t{tag} << ActorId::kKindShift}), Error);
    }
  }

  TEST_CASE("member list follows a vector shadow") {
    ChunkPool pool(64);
    MemberList list;
    std::vector<ActorId> shadow;
    RngStream rng(11, 0, Purpose::synth, 0);
    for (int step = 0; step < 5000; ++step) {
      const ActorId id = person_id(rng.below(200));
      const bool present = std::find(shadow.begin(), shadow.end(), id) != shadow.end();
      if (rng.uniform() < 0.55) {
        if (present) {
          CHECK_THROWS_AS(list.add(id, pool), Error);
        } else {
          list.add(id, pool);
          shadow.push_back(id);
        }
      } else if (present) {
        list.remove(id, pool);
        shadow.erase(std::find(shadow.begin(), shadow.end(), id));
      } else {
        CHECK_THROWS_AS(list.remove(id, pool), Error);
      }
      REQUIRE(list.size() == shadow.size());
      CHECK(pool.in_use() == MemberList::chunks_for(shadow.size()));
      if (step % 97 == 0) {
        std::vector<ActorId> seen;
        list.for_each(pool, [&](ActorId m) { seen.push_back(m); });
        CHECK(seen == shadow);
        CHECK(list.contains(id, pool) == (std::find(shadow.begin(), shadow.end(), id) != shadow.end()));
      }
    }
    list.clear(pool);
    CHECK(list.empty());
    CHECK(pool.in_use() == 0);
    CHECK(pool.allocations() == pool.releases());
  }

  TEST_CASE("chunk counts at the inline and chunk boundaries") {
    CHECK(MemberList::chunks_for(0) == 0);
    CHECK(MemberList::chunks_for(4) == 0);
    CHECK(MemberList::chunks_for(5) == 1);
    CHECK(MemberList::chunks_for(24) == 1);
    CHECK(MemberList::chunks_for(25) == 2);
    ChunkPool pool(4);
    MemberList list;
    for (std::uint64_t i = 0; i < 24; ++i) list.add(person_id(i), pool);
    CHECK(pool.in_use() == 1);
    list.add(person_id(24), pool);
    CHECK(pool.in_use() == 2);
    list.remove(person_id(0), pool);
    CHECK(pool.in_use() == 1);
  }

  TEST_CASE("scan folds in insertion order") {
    ChunkPool pool(8);
    MemberList list;
    for (std::uint64_t i : {7, 3, 9, 1, 12, 5, 30, 2}) list.add(person_id(i), pool);
    const auto sum = list.scan(pool, std::uint64_t{0}, [](std::uint64_t acc, ActorId m) { return acc + m.index(); });
    CHECK(sum == 69);
    const auto digits =
        list.scan(pool, std::string{}, [](std::string acc, ActorId m) { return acc + std::to_string(m.index()) + ","; });
    CHECK(digits == "7,3,9,1,12,5,30,2,");
  }

  TEST_CASE("pool exhaustion is reported") {
    ChunkPool pool(1);
    MemberList list;
    for (std::uint64_t i = 0; i < 24; ++i) list.add(person_id(i), pool);
    CHECK_THROWS_AS(list.add(person_id(99), pool), PoolExhausted);
    CHECK(list.size() == 24);

    Population pop(1, 1, 0);
    pop.add_person({});
    CHECK_THROWS_AS(pop.add_person({}), PoolExhausted);
    pop.init_home(1, 0, 0);
    CHECK_THROWS_AS(pop.init_home(2, 0, 0), PoolExhausted);
  }

  TEST_CASE("houses carry their kind and care extras only for care units") {
    Population pop(4, 8, 4);
    const ActorId home = pop.init_home(77, 3, 5);
    const ActorId work = pop.init_workplace(ActorKind::workplace, 200415, 4, 6, 45230);
    const ActorId school = pop.init_workplace(ActorKind::school, 9, 4, 6, 0);
    const ActorId er = pop.init_akutmott(1, 2, 3);
    const ActorId did = pop.init_inf_klinik(1, 2, 4);
    CHECK(home.kind() == ActorKind::home);
    CHECK(pop.house(home).register_id == 77);
    CHECK(pop.house(work).sni_kod == 45230);
    CHECK(pop.house(school).house_type == ActorKind::school);
    CHECK(pop.care_extra(home) == nullptr);
    CHECK(pop.care_extra(work) == nullptr);
    CHECK(pop.care_extra(school) == nullptr);
    REQUIRE(pop.care_extra(er) != nullptr);
    REQUIRE(pop.care_extra(did) != nullptr);
    CHECK(pop.care_extra(er)->capacity == 3);
    CHECK(pop.care_extra(did)->capacity == 4);
    CHECK_THROWS_AS(pop.init_workplace(ActorKind::er, 1, 0, 0, 0), Error);
    CHECK_THROWS_AS(pop.init_workplace(ActorKind::home, 1, 0, 0, 0), Error);

    const ActorId a = pop.add_person({});
    pop.connect(a, home);
    pop.connect(a, work);
    CHECK(pop.person(a).home == home);
    CHECK(pop.person(a).workplace == work);
    CHECK_THROWS_AS(pop.connect(a, home), Error);
  }

  TEST_CASE("departments split large workplaces") {
    Population pop(50, 2, 8);
    const ActorId small = pop.init_workplace(ActorKind::workplace, 1, 0, 0, 0);
    const ActorId big = pop.init_workplace(ActorKind::workplace, 2, 0, 0, 0);
    for (int i = 0; i < 45; ++i) pop.connect(pop.add_person({}), big);
    for (int i = 0; i < 5; ++i) pop.connect(pop.add_person({}), small);
    pop.assign_departments(20);
    for (int i = 0; i < 45; ++i) CHECK(pop.person(person_id(i)).department == i / 20);
    for (int i = 45; i < 50; ++i) CHECK(pop.person(person_id(i)).department == 0);
  }

  TEST_CASE("population build tallies the network") {
    std::vector<XYRecord> xy{{0, 1500000, 6500000}, {1, 1500100, 6500000}};
    const GridIndex grid = GridIndex::build(xy);
    const std::uint64_t sq0 = combine_coords(1500000, 6500000), sq1 = combine_coords(1500100, 6500000);
    std::vector<PersonRecord> persons;
    for (std::uint64_t i = 0; i < 30; ++i) {
      persons.push_back({i + 1, 1, 30, i / 3, i % 2 ? sq1 : sq0, i < 25 ? 500u : (i < 27 ? 900u : 0u), 0, 1});
    }
    std::vector<WorkplaceRecord> wps{{500, sq0, 25, 1, 1, WorkplaceType::workplace},
                                     {900, sq1, 2, 8511, 1, WorkplaceType::workplace}};
    PopulationOptions opt;
    opt.department_size = 10;
    const Population pop = Population::build(persons, wps, grid, opt);
    CHECK(pop.persons().size() == 30);
    std::size_t homes = 0, members = 0;
    for (const House& h : pop.houses()) {
      if (h.actor_id.is_home()) {
        ++homes;
        CHECK(h.members.size() == 3);
      }
      if (!h.actor_id.is_care_unit()) members += h.members.size();
    }
    CHECK(homes == 10);
    CHECK(members == 30 + 27);
    CHECK(pop.er_units().size() == 1);
    CHECK(pop.did_units().size() == 1);
    for (const Person& p : pop.persons()) {
      CHECK(p.home.is_home());
      if (p.workplace.is_none()) continue;
      CHECK(pop.house(p.workplace).members.contains(p.actor_id, pop.chunks()));
    }
    CHECK(pop.person(person_id(24)).department == 2);

    wps[0].no_of_employees = 24;
    CHECK_THROWS_AS(Population::build(persons, wps, grid, opt), Error);
    wps[0].no_of_employees = 25;
    persons[0].workplace_id = 12345;
    CHECK_THROWS_AS(Population::build(persons, wps, grid, opt), Error);
  }

  TEST_CASE("latent sampling statistics") {
    DiseaseProfile p = two_stage();
    RngStream rng(5, 0, Purpose::latent, 0);
    for (int i = 0; i < 100; ++i) CHECK(sample_latent_period(p.latent, rng) == 10);

    LatentSpec u;
    u.family = LatentFamily::uniform;
    u.min_hours = 24;
    u.max_hours = 72;
    double sum = 0;
    Hour lo = 1000, hi = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const Hour h = sample_latent_period(u, rng);
      sum += h;
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
    CHECK(lo == 24);
    CHECK(hi == 72);
    const double sd_mean = std::sqrt((49.0 * 49.0 - 1) / 12.0 / n);
    CHECK(std::abs(sum / n - u.mean()) < 4 * sd_mean);

    LatentSpec ln;
    ln.family = LatentFamily::lognormal;
    ln.median_hours = 48;
    ln.sigma = 0.3;
    std::vector<Hour> xs(n);
    for (auto& x : xs) x = sample_latent_period(ln, rng);
    std::nth_element(xs.begin(), xs.begin() + n / 2, xs.end());
    CHECK(std::abs(xs[n / 2] - 48) <= 1);
  }

  TEST_CASE("disease level matches a cumulative-sum oracle") {
    const DiseaseProfile p = two_stage();
    for (int death : {-1, 0, 1}) {
      InfectionCourse c{100, 10, static_cast<std::int16_t>(death)};
      for (Hour h = 90; h < 140; ++h) {
        const DiseaseLevel got = disease_level(p, c, h);
        const DiseaseLevel want = level_oracle(p, c, h);
        CHECK(got.state == want.state);
        CHECK(got.stage == want.stage);
        CHECK(got.infectiousness == want.infectiousness);
      }
      const Hour res = resolution_hour(p, c);
      CHECK(disease_level(p, c, res - 1).state == HostState::infectious);
      CHECK(disease_level(p, c, res).state == (death >= 0 ? HostState::deceased : HostState::recovered));
    }
    CHECK(disease_level(p, InfectionCourse{}, 1000).state == HostState::susceptible);
    CHECK(p.stage_end(1) == 12);
    CHECK(p.infectious_hours() == 12);
  }

  TEST_CASE("disease profiles roundtrip and validate") {
    DiseaseProfile p = two_stage();
    p.name = "flu";
    p.stages[0].stay_home_prob = 0.25;
    p.stages[1].care_seek_er_prob = 0.125;
    p.stages[1].care_seek_did_prob = 0.0625;
    std::stringstream buf;
    write_disease_profile(buf, p);
    const DiseaseProfile q = parse_disease_profile(buf);
    CHECK(q.name == "flu");
    CHECK(q.latent.hours == 10);
    REQUIRE(q.stages.size() == 2);
    CHECK(q.stages[0].stay_home_prob == 0.25);
    CHECK(q.stages[1].care_seek_er_prob == 0.125);
    CHECK(q.stages[1].fatality_prob == 0.5);

    DiseaseProfile bad = two_stage();
    bad.stages[0].stay_home_prob = 0.7;
    bad.stages[0].care_seek_er_prob = 0.4;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = two_stage();
    bad.stages[1].duration_hours = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.stages.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    std::istringstream unknown("[latent]\nfamily = gamma\n[stage]\nduration_hours = 2\n");
    CHECK_THROWS_AS(parse_disease_profile(unknown), ConfigError);
  }
}
