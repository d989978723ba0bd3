#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_map>

#include "microsim/epidemic.hpp"

namespace microsim {

namespace {

std::size_t event_capacity(const Population& pop) { return pop.persons().size() + pop.houses().size() + 2; }

bool is_transmission_hour(Hour h) {
  const Hour hod = h % kHoursPerDay;
  return hod == kMorningTransmit || hod == kEveningTransmit;
}

}  // namespace

Simulation::Simulation(Population population, const GridIndex& grid, CareUnitMap care_map,
                       DiseaseProfile profile, SimulationConfig config)
    : pop_(std::move(population)),
      grid_(grid),
      care_map_(std::move(care_map)),
      profile_(std::move(profile)),
      cfg_(config),
      axis_(config.horizon, event_capacity(pop_), event_capacity(pop_) + 16) {
  cfg_.validate();
  profile_.validate();
  if (!care_map_.empty() && care_map_.size() != grid_.size()) {
    throw Error("care map has " + std::to_string(care_map_.size()) + " entries for " +
                std::to_string(grid_.size()) + " squares");
  }
  for (const House& h : pop_.houses()) {
    if (h.xy >= grid_.size()) throw Error("house located outside the grid index");
  }
  axis_.set_running_limit(cfg_.running_limit);
  axis_.set_cleanup_limit(cfg_.cleanup_limit);

  for (Person& p : pop_.persons()) p.life = axis_.create_event(EventKind::life_of_person, p.actor_id);
  for (House& h : pop_.houses()) {
    h.life = axis_.create_event(EventKind::life_of_house, h.actor_id);
    if (h.house_type == ActorKind::did) did_houses_.push_back(h.actor_id);
  }
  housekeeping_ = axis_.create_event(EventKind::housekeeping, ActorId::none());
  cleanup_ = axis_.create_event(EventKind::housekeeping, ActorId::none());

  axis_.set_current(cfg_.seed_hour);
  if (cfg_.optimize) {
    const Hour first = (cfg_.seed_hour / cfg_.cleanup_interval + 1) * cfg_.cleanup_interval;
    if (first < cfg_.horizon) {
      axis_.add_event(cleanup_, first);
      has_cleanup_ = true;
    }
  } else {
    const Hour move = next_movement_hour(cfg_.seed_hour);
    const Hour transmit = next_transmission_hour(cfg_.seed_hour);
    if (move < cfg_.horizon) {
      for (const Person& p : pop_.persons()) axis_.add_event(p.life, move);
    }
    if (transmit < cfg_.horizon) {
      for (const House& h : pop_.houses()) axis_.add_event(h.life, transmit);
    }
  }
  apply_mass_vaccination();
}

void Simulation::apply_mass_vaccination() {
  const auto& iv = cfg_.interventions;
  if (iv.mass_coverage <= 0.0) return;
  for (Person& p : pop_.persons()) {
    RngStream rng(cfg_.seed, p.actor_id.value(), Purpose::vaccine, 0);
    if (rng.uniform() < iv.mass_coverage) p.vaccination_success = iv.mass_efficacy;
  }
}

DiseaseLevel Simulation::level(const Person& p, Hour now) const { return disease_level(profile_, p.course, now); }

HostState Simulation::host_state(const Person& p, Hour now) const { return level(p, now).state; }

ActorId Simulation::location(const Person& p, Hour hour) const {
  if (p.course.infected()) {
    const DiseaseLevel lvl = level(p, hour);
    if (lvl.state == HostState::deceased) return ActorId::none();
    if (lvl.state == HostState::infectious && !p.transmission_site.is_none()) return p.transmission_site;
  }
  if (p.visit_hour == hour - 1 && !p.visit_site.is_none()) return p.visit_site;
  return routine_site(p, hour);
}

LoggedPerson Simulation::logged(const Person& p) const {
  return {p.ind_id, p.fam_id, p.region, p.age, p.sex, p.department};
}

double Simulation::site_factor(const House& h) const noexcept {
  double f = cfg_.hazard_scale;
  if (!h.actor_id.is_home() && !h.actor_id.is_care_unit()) f *= cfg_.interventions.social_distancing;
  return f;
}

void Simulation::ensure_scheduled(std::uint32_t event, Hour at) {
  if (at >= cfg_.horizon || axis_.is_scheduled(event)) return;
  axis_.add_event(event, at);
}

void Simulation::ensure_housekeeping() {
  if (!axis_.is_scheduled(housekeeping_)) axis_.add_event(housekeeping_, axis_.now());
}

std::vector<ActorId> Simulation::seed_outbreak(const OutbreakSpec& spec) {
  if (started_) throw Error("seed_outbreak must be called before run");
  std::vector<ActorId> chosen;
  auto persons = pop_.persons();
  if (!spec.ind_ids.empty()) {
    std::unordered_map<std::uint64_t, std::uint32_t> by_id;
    by_id.reserve(persons.size());
    for (std::uint32_t i = 0; i < persons.size(); ++i) by_id.emplace(persons[i].ind_id, i);
    for (std::uint64_t id : spec.ind_ids) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw Error("outbreak seed " + std::to_string(id) + " is not in the population");
      chosen.push_back(persons[it->second].actor_id);
    }
  } else if (spec.count > 0) {
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t i = 0; i < persons.size(); ++i) {
      if (!spec.region || persons[i].region == *spec.region) candidates.push_back(i);
    }
    if (spec.count > candidates.size()) {
      throw Error("outbreak asks for " + std::to_string(spec.count) + " persons but only " +
                  std::to_string(candidates.size()) + " match");
    }
    RngStream rng(spec.seed != 0 ? spec.seed : cfg_.seed, 0, Purpose::seed, 0);
    for (std::uint64_t k = 0; k < spec.count; ++k) {
      const auto j = k + rng.below(candidates.size() - k);
      std::swap(candidates[k], candidates[j]);
      chosen.push_back(persons[candidates[k]].actor_id);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  if (std::adjacent_find(chosen.begin(), chosen.end()) != chosen.end()) {
    throw Error("outbreak seed list names a person twice");
  }
  for (ActorId id : chosen) {
    Person& p = pop_.person(id);
    if (p.course.infected()) throw Error("outbreak seed " + std::to_string(p.ind_id) + " is already infected");
    infect(p, cfg_.seed_hour, pop_.house(p.home), 0.0, nullptr);
  }
  flush_hour();
  return chosen;
}

void Simulation::infect(Person& p, Hour hour, const House& site, double risk, const Person* infector) {
  p.course = sample_infection_course(profile_, cfg_.seed, p.actor_id, hour);
  latest_resolution_ = std::max(latest_resolution_, resolution_hour(profile_, p.course));
  ++infections_;
  const auto day = static_cast<std::size_t>(hour / kHoursPerDay);
  if (daily_.size() <= day) daily_.resize(day + 1, 0);
  ++daily_[day];
  infected_order_.push_back(p.actor_id);

  InfectionLogEntry e;
  e.seed = cfg_.seed;
  e.infection_hour = hour;
  e.place_type = std::string(kind_name(site.house_type));
  const Coord at = grid_.coord(site.xy);
  e.place_east = at.east;
  e.place_north = at.north;
  e.risk = risk;
  if (infector) e.infector = logged(*infector);
  e.infected = logged(p);
  hour_order_.emplace_back(p.actor_id.value(), hour_log_.size());
  hour_log_.push_back(std::move(e));
  pending_cascade_.push_back(p.actor_id);
}

void Simulation::flush_hour() {
  std::sort(pending_cascade_.begin(), pending_cascade_.end());
  for (ActorId id : pending_cascade_) cascade(pop_.person(id));
  pending_cascade_.clear();

  std::sort(hour_order_.begin(), hour_order_.end());
  if (sink_) {
    for (const auto& [person, idx] : hour_order_) sink_(hour_log_[idx]);
  }
  hour_order_.clear();
  hour_log_.clear();
}

void Simulation::cascade(Person& p) {
  const Hour at = p.course.infected_at;
  ensure_scheduled(p.life, next_movement_hour(at));
  const auto& iv = cfg_.interventions;
  for (ActorId site : {p.home, p.workplace}) {
    if (site.is_none()) continue;
    House& h = pop_.house(site);
    if (!h.is_infected) {
      h.is_infected = true;
      if (iv.targeted_coverage > 0.0) {
        h.members.for_each(pop_.chunks(), [&](ActorId m) {
          Person& member = pop_.person(m);
          RngStream rng(cfg_.seed, m.value(), Purpose::targeted, 0);
          if (rng.uniform() < iv.targeted_coverage) {
            member.vaccination_success = std::max(member.vaccination_success, iv.targeted_efficacy);
          }
        });
      }
    }
    ensure_scheduled(h.life, next_transmission_hour(at));
  }
}

void Simulation::execute(EventIndex e) {
  const EventObject& ev = axis_.event(e);
  const Hour now = axis_.now();
  switch (ev.kind) {
    case EventKind::life_of_person: {
      Person& p = pop_.person(ev.subject);
      person_event(p);
      if (!axis_.is_scheduled(e)) {
        const Hour next = next_movement_hour(now);
        if (next < cfg_.horizon) axis_.add_event(e, next); else axis_.terminate(e);
      }
      break;
    }
    case EventKind::life_of_house: {
      House& h = pop_.house(ev.subject);
      house_event(h);
      if (!axis_.is_scheduled(e)) {
        const Hour next = next_transmission_hour(now);
        if (next < cfg_.horizon) axis_.add_event(e, next); else axis_.terminate(e);
      }
      break;
    }
    case EventKind::housekeeping:
      if (e == cleanup_) {
        cleanup_pass();
        axis_.hold(e, cfg_.cleanup_interval);
      } else {
        housekeeping_event();
      }
      break;
  }
}

void Simulation::discharge(Person& p) {
  if (!p.transmission_site.is_care_unit()) return;
  CareExtra* extra = pop_.care_extra(p.transmission_site);
  if (extra && extra->patients.contains(p.actor_id, pop_.chunks())) {
    extra->patients.remove(p.actor_id, pop_.chunks());
    --extra->occupancy;
  }
  p.transmission_site = p.home;
}

void Simulation::person_event(Person& p) {
  const Hour now = axis_.now();
  const DiseaseLevel lvl = level(p, now);
  if (lvl.state == HostState::deceased) {
    p.deceased = true;
    discharge(p);
    p.transmission_site = ActorId::none();
    return;
  }
  if (lvl.state == HostState::recovered) p.immune = true;

  if (p.transmission_site.is_care_unit()) {
    if (p.transmission_site.kind() == ActorKind::did && lvl.state == HostState::infectious) {
      if (now % kHoursPerDay == kEveningMove && cfg_.visitors_per_patient > 0) ensure_housekeeping();
      return;
    }
    discharge(p);
  }

  ActorId site = routine_site(p, now);
  if (lvl.state == HostState::infectious) {
    if (cfg_.interventions.isolation) {
      site = p.home;
    } else {
      const DiseaseStage& st = profile_.stages[static_cast<std::size_t>(lvl.stage)];
      RngStream rng(cfg_.seed, p.actor_id.value(), Purpose::place, static_cast<std::uint32_t>(now));
      const double u = rng.uniform();
      const bool care = !care_map_.empty();
      const House& home = pop_.house(p.home);
      if (u < st.care_seek_er_prob) {
        site = p.home;
        if (care) requests_.push_back({p.actor_id.value(), care_map_.at(home.xy).er});
      } else if (u < st.care_seek_er_prob + st.care_seek_did_prob) {
        site = p.home;
        if (care) requests_.push_back({p.actor_id.value(), care_map_.at(home.xy).did});
      } else if (u < st.care_seek_er_prob + st.care_seek_did_prob + st.stay_home_prob) {
        site = p.home;
      }
      if (!requests_.empty()) ensure_housekeeping();
    }
  }
  p.transmission_site = site;
}

void Simulation::housekeeping_event() {
  const Hour now = axis_.now();
  for (ActorId unit : visited_units_) pop_.care_extra(unit)->visitors.clear(pop_.chunks());
  visited_units_.clear();

  std::sort(requests_.begin(), requests_.end(),
            [](const CareRequest& a, const CareRequest& b) { return a.person < b.person; });
  for (const CareRequest& r : requests_) {
    Person& p = pop_.person(ActorId{r.person});
    CareExtra* extra = pop_.care_extra(r.unit);
    if (!extra) throw Error("care map points at a house without care data");
    if (extra->is_full()) {
      ++refusals_;
      continue;
    }
    extra->patients.add(p.actor_id, pop_.chunks());
    ++extra->occupancy;
    p.transmission_site = r.unit;
    ensure_scheduled(pop_.house(r.unit).life, next_transmission_hour(now));
  }
  requests_.clear();
  if (now % kHoursPerDay == kEveningMove) assign_visitors(now);
}

void Simulation::assign_visitors(Hour hour) {
  if (cfg_.visitors_per_patient == 0) return;
  std::vector<ActorId> candidates;
  for (ActorId did : did_houses_) {
    CareExtra* extra = pop_.care_extra(did);
    if (!extra || extra->patients.empty()) continue;
    std::vector<ActorId> patients;
    extra->patients.for_each(pop_.chunks(), [&](ActorId m) { patients.push_back(m); });
    for (ActorId pid : patients) {
      const Person& patient = pop_.person(pid);
      candidates.clear();
      pop_.house(patient.home).members.for_each(pop_.chunks(), [&](ActorId m) {
        if (m == pid) return;
        const Person& q = pop_.person(m);
        const HostState s = host_state(q, hour);
        if (s == HostState::infectious || s == HostState::deceased) return;
        if (q.transmission_site.is_care_unit() || q.visit_hour == hour) return;
        candidates.push_back(m);
      });
      RngStream rng(cfg_.seed, pid.value(), Purpose::visit, static_cast<std::uint32_t>(hour));
      const std::size_t take = std::min<std::size_t>(cfg_.visitors_per_patient, candidates.size());
      for (std::size_t k = 0; k < take; ++k) {
        const auto j = k + rng.below(candidates.size() - k);
        std::swap(candidates[k], candidates[j]);
        Person& v = pop_.person(candidates[k]);
        v.visit_site = did;
        v.visit_hour = hour;
        extra->visitors.add(v.actor_id, pop_.chunks());
      }
      if (take > 0 && (visited_units_.empty() || visited_units_.back() != did)) visited_units_.push_back(did);
    }
  }
}

void Simulation::house_event(House& h) {
  const Hour now = axis_.now();
  if (is_transmission_hour(now)) transmit(h, now);
}

void Simulation::transmit(House& h, Hour hour) {
  present_.clear();
  const ActorId here = h.actor_id;
  const bool split = !here.is_home() && !here.is_care_unit() && h.members.size() > pop_.department_size();
  const double factor = site_factor(h);
  std::uint16_t max_group = 0;
  double total = 0.0;

  auto consider = [&](ActorId m, bool by_department) {
    const Person& p = pop_.person(m);
    if (location(p, hour) != here) return;
    const DiseaseLevel lvl = level(p, hour);
    const std::uint16_t g = by_department ? p.department : 0;
    if (lvl.state == HostState::susceptible) {
      present_.push_back({m, g, 0.0, true});
    } else if (lvl.state == HostState::infectious && lvl.infectiousness > 0.0) {
      const double lambda = lvl.infectiousness * factor;
      if (lambda <= 0.0) return;
      present_.push_back({m, g, lambda, false});
      total += lambda;
    } else {
      return;
    }
    max_group = std::max(max_group, g);
  };

  h.members.for_each(pop_.chunks(), [&](ActorId m) { consider(m, split); });
  if (const CareExtra* extra = here.is_care_unit() ? pop_.care_extra(here) : nullptr) {
    extra->patients.for_each(pop_.chunks(), [&](ActorId m) { consider(m, false); });
    extra->visitors.for_each(pop_.chunks(), [&](ActorId m) {
      const Person& v = pop_.person(m);
      if (v.visit_hour == hour - 1 && v.visit_site == here) consider(m, false);
    });
  }
  if (total <= 0.0) return;
  h.last_hazard_hour = hour;

  group_hazard_.assign(static_cast<std::size_t>(max_group) + 1, 0.0);
  for (const Present& pr : present_) group_hazard_[pr.group] += pr.hazard;

  new_cases_.clear();
  for (const Present& pr : present_) {
    if (!pr.susceptible || group_hazard_[pr.group] <= 0.0) continue;
    const double p = risk_from_hazard(group_hazard_[pr.group]);
    if (exposure_draw(cfg_.seed, pr.person, hour, p, pop_.person(pr.person).vaccination_success)) {
      new_cases_.push_back({pr.person, pr.group, p});
    }
  }
  for (const NewCase& c : new_cases_) {
    candidates_.clear();
    for (const Present& pr : present_) {
      if (!pr.susceptible && pr.group == c.group) candidates_.push_back(pr);
    }
    std::sort(candidates_.begin(), candidates_.end(),
              [](const Present& a, const Present& b) { return a.person < b.person; });
    candidate_hazard_.clear();
    for (const Present& pr : candidates_) candidate_hazard_.push_back(pr.hazard);
    const std::size_t k = choose_infector(cfg_.seed, c.person, hour, candidate_hazard_);
    infect(pop_.person(c.person), hour, h, c.risk, &pop_.person(candidates_[k].person));
  }
}

bool Simulation::deactivation_eligible(ActorId entity, Hour now) const {
  if (entity.is_person()) {
    const Person& p = pop_.person(entity);
    const HostState s = host_state(p, now);
    if (s == HostState::recovered || s == HostState::deceased) return !p.transmission_site.is_care_unit();
    if (s != HostState::susceptible) return false;
    bool exposed = false;
    for (ActorId site : {p.home, p.workplace}) {
      if (site.is_none()) continue;
      pop_.house(site).members.for_each(pop_.chunks(), [&](ActorId m) {
        if (host_state(pop_.person(m), now) == HostState::infectious) exposed = true;
      });
    }
    return !exposed;
  }
  const House& h = pop_.house(entity);
  bool at_risk = false;
  auto check = [&](ActorId m) {
    const HostState s = host_state(pop_.person(m), now);
    if (s == HostState::latent || s == HostState::infectious) at_risk = true;
  };
  h.members.for_each(pop_.chunks(), check);
  if (const CareExtra* extra = entity.is_care_unit() ? pop_.care_extra(entity) : nullptr) {
    if (!extra->patients.empty()) return false;
  }
  if (at_risk) return false;
  if (h.last_hazard_hour == kNever) return true;
  return static_cast<std::int64_t>(now) - h.last_hazard_hour >=
         static_cast<std::int64_t>(cfg_.house_idle_days) * kHoursPerDay;
}

std::size_t Simulation::cleanup_pass() {
  const Hour now = axis_.now();
  std::size_t n = 0;
  for (Person& p : pop_.persons()) {
    if (axis_.is_scheduled(p.life) && deactivation_eligible(p.actor_id, now)) {
      if (host_state(p, now) == HostState::recovered) p.immune = true;
      axis_.passivate(p.life);
      ++n;
    }
  }
  for (House& h : pop_.houses()) {
    if (axis_.is_scheduled(h.life) && deactivation_eligible(h.actor_id, now)) {
      axis_.passivate(h.life);
      ++n;
    }
  }
  deactivations_ += n;
  ++cleanup_passes_;
  return n;
}

bool Simulation::is_active(ActorId entity) const {
  if (entity.is_person()) return axis_.is_scheduled(pop_.person(entity).life);
  return axis_.is_scheduled(pop_.house(entity).life);
}

std::uint64_t Simulation::active_entities() const {
  return axis_.scheduled_count(EventKind::life_of_person) + axis_.scheduled_count(EventKind::life_of_house);
}

Census Simulation::census(Hour now) const {
  Census c;
  for (const Person& p : pop_.persons()) {
    switch (host_state(p, now)) {
      case HostState::susceptible: ++c.susceptible; break;
      case HostState::latent: ++c.latent; break;
      case HostState::infectious: ++c.infectious; break;
      case HostState::recovered: ++c.recovered; break;
      case HostState::deceased: ++c.deceased; break;
    }
  }
  return c;
}

RunSummary Simulation::run(const Observer& observer) {
  if (started_) throw Error("a simulation can only be run once");
  started_ = true;
  const auto t0 = std::chrono::steady_clock::now();
  RunSummary s;
  s.population = pop_.persons().size();
  s.peak_active_entities = active_entities();

  Hour h = axis_.now();
  auto exec = [this](EventIndex e) { execute(e); };
  while (h < cfg_.horizon) {
    if (cfg_.stop_at_extinction && h > latest_resolution_) {
      s.extinct = true;
      break;
    }
    while (axis_.now() <= h) s.executed_events += axis_.run(h + 1, exec);
    flush_hour();
    s.peak_active_entities = std::max<std::uint64_t>(s.peak_active_entities, active_entities());
    if (observer) observer(*this, h);
    ++h;
  }
  s.end_hour = h;
  s.infections = infections_;
  s.attack_rate = s.population == 0 ? 0.0 : static_cast<double>(infections_) / static_cast<double>(s.population);
  for (std::size_t d = 0; d < daily_.size(); ++d) {
    if (daily_[d] > s.peak_day_infections) {
      s.peak_day_infections = daily_[d];
      s.peak_day = static_cast<int>(d);
    }
  }
  s.care_refusals = refusals_;
  s.cleanup_passes = cleanup_passes_;
  s.deactivations = deactivations_;
  for (ActorId id : infected_order_) {
    if (host_state(pop_.person(id), h) == HostState::deceased) ++s.deceased;
  }
  s.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

std::size_t Simulation::memory_bytes() const noexcept {
  return pop_.memory_bytes() + axis_.memory_bytes() + care_map_.size() * sizeof(CareAssignment) +
         did_houses_.capacity() * sizeof(ActorId);
}

}  // namespace microsim
