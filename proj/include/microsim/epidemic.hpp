#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "microsim/disease_profile.hpp"
#include "microsim/geography.hpp"
#include "microsim/infection_log.hpp"
#include "microsim/population.hpp"
#include "microsim/time_axis.hpp"

namespace microsim {

inline constexpr Hour kMorningMove = 8;
inline constexpr Hour kEveningMove = 16;
inline constexpr Hour kMorningTransmit = 9;
inline constexpr Hour kEveningTransmit = 17;

/// First movement (8 or 16 o'clock) or transmission (9 or 17) hour strictly after `h`.
Hour next_movement_hour(Hour h) noexcept;
Hour next_transmission_hour(Hour h) noexcept;

/// Where a person without an infectious override spends hour `h`: the
/// workplace during [8, 16) if there is one, otherwise home.
ActorId routine_site(const Person& p, Hour h) noexcept;

// ---------------------------------------------------------------------------
// Exposure primitives, shared with the random-mixing oracle.

/// 1 - exp(-sum(hazards)), kept strictly below 1.
double compute_risk(std::span<const double> hazards) noexcept;
double risk_from_hazard(double total_hazard) noexcept;

/// True when the keyed exposure draw of `person` at `hour` falls below
/// p * (1 - vaccination_success).
bool exposure_draw(std::uint64_t seed, ActorId person, Hour hour, double p, double vaccination_success) noexcept;

/// Latent period and fatality outcome of a person infected at `hour`.
InfectionCourse sample_infection_course(const DiseaseProfile& profile, std::uint64_t seed, ActorId person,
                                        Hour hour);

/// Index into `hazards` chosen with probability proportional to its value.
std::size_t choose_infector(std::uint64_t seed, ActorId infected, Hour hour, std::span<const double> hazards);

// ---------------------------------------------------------------------------

struct Interventions {
  double mass_coverage = 0.0;
  double mass_efficacy = 0.0;
  double targeted_coverage = 0.0;
  double targeted_efficacy = 0.0;
  /// Infectious persons stay home.
  bool isolation = false;
  /// Hazard multiplier at workplaces, schools, daycare and colleges.
  double social_distancing = 1.0;

  /// Throws ConfigError for values outside [0,1].
  void validate() const;
};

struct OutbreakSpec {
  /// Register ids of the initially infected; used when non-empty.
  std::vector<std::uint64_t> ind_ids;
  std::uint64_t count = 0;
  std::optional<std::uint16_t> region;
  /// Selection seed; 0 means the simulation seed.
  std::uint64_t seed = 0;
};

struct SimulationConfig {
  std::uint64_t seed = 1;
  Hour horizon = 8760;
  /// Keep only at-risk entities on the timeline.
  bool optimize = true;
  int house_idle_days = 5;
  Hour cleanup_interval = 120;
  /// Hour of day 0 at which outbreak seeds are infected (9 or 17).
  Hour seed_hour = kMorningTransmit;
  double hazard_scale = 1.0;
  std::uint32_t visitors_per_patient = 1;
  Interventions interventions;
  std::uint64_t running_limit = 0;
  std::size_t cleanup_limit = 0;
  /// Stop as soon as no infection can happen any more.
  bool stop_at_extinction = true;

  void validate() const;
};

struct RunSummary {
  std::uint64_t population = 0;
  std::uint64_t infections = 0;
  double attack_rate = 0.0;
  int peak_day = -1;
  std::uint64_t peak_day_infections = 0;
  /// Largest number of persons and houses on the timeline after any hour.
  std::uint64_t peak_active_entities = 0;
  Hour end_hour = 0;
  bool extinct = false;
  std::uint64_t executed_events = 0;
  std::uint64_t care_refusals = 0;
  std::uint64_t cleanup_passes = 0;
  std::uint64_t deactivations = 0;
  std::uint64_t deceased = 0;
  double runtime_seconds = 0.0;
};

struct Census {
  std::uint64_t susceptible = 0;
  std::uint64_t latent = 0;
  std::uint64_t infectious = 0;
  std::uint64_t recovered = 0;
  std::uint64_t deceased = 0;

  std::uint64_t total() const noexcept { return susceptible + latent + infectious + recovered + deceased; }
};

class Simulation {
 public:
  /// Called after every simulated hour with the hour just completed.
  using Observer = std::function<void(const Simulation&, Hour)>;
  using LogSink = std::function<void(const InfectionLogEntry&)>;

  Simulation(Population population, const GridIndex& grid, CareUnitMap care_map, DiseaseProfile profile,
             SimulationConfig config);

  /// Infects the chosen persons at the seed hour and returns them.
  /// Throws Error when the spec asks for more persons than match.
  std::vector<ActorId> seed_outbreak(const OutbreakSpec& spec);

  /// Entries are delivered per hour in infected-person order.
  void set_log_sink(LogSink sink) { sink_ = std::move(sink); }
  void set_trace(std::ostream* trace) { axis_.set_trace(trace); }

  RunSummary run(const Observer& observer = {});

  HostState host_state(const Person& p, Hour now) const;
  DiseaseLevel level(const Person& p, Hour now) const;
  /// Transmission site of `p` for the transmission event at `hour`, or none.
  ActorId location(const Person& p, Hour hour) const;

  /// Eligibility of a person or house for removal from the timeline.
  bool deactivation_eligible(ActorId entity, Hour now) const;
  /// Passivates every eligible entity; returns how many were passivated.
  std::size_t cleanup_pass();

  bool is_active(ActorId entity) const;
  std::uint64_t active_entities() const;
  Census census(Hour now) const;

  const Population& population() const noexcept { return pop_; }
  Population& population() noexcept { return pop_; }
  const TimeAxis& axis() const noexcept { return axis_; }
  const DiseaseProfile& profile() const noexcept { return profile_; }
  const SimulationConfig& config() const noexcept { return cfg_; }
  const CareUnitMap& care_map() const noexcept { return care_map_; }
  std::uint64_t infections() const noexcept { return infections_; }
  const std::vector<std::uint64_t>& daily_incidence() const noexcept { return daily_; }
  /// Persons infected so far, in infection order.
  const std::vector<ActorId>& infected_persons() const noexcept { return infected_order_; }

  std::size_t memory_bytes() const noexcept;

 private:
  struct CareRequest {
    std::uint64_t person;
    ActorId unit;
  };
  struct Present {
    ActorId person;
    std::uint16_t group;
    double hazard;
    bool susceptible;
  };
  struct NewCase {
    ActorId person;
    std::uint16_t group;
    double risk;
  };

  void execute(EventIndex e);
  void person_event(Person& p);
  void house_event(House& h);
  void housekeeping_event();
  void transmit(House& h, Hour hour);
  void infect(Person& p, Hour hour, const House& site, double risk, const Person* infector);
  void cascade(Person& p);
  void ensure_scheduled(std::uint32_t event, Hour at);
  void ensure_housekeeping();
  void discharge(Person& p);
  void assign_visitors(Hour hour);
  void apply_mass_vaccination();
  double site_factor(const House& h) const noexcept;
  LoggedPerson logged(const Person& p) const;
  void flush_hour();

  Population pop_;
  const GridIndex& grid_;
  CareUnitMap care_map_;
  DiseaseProfile profile_;
  SimulationConfig cfg_;
  TimeAxis axis_;
  EventIndex housekeeping_ = 0;
  EventIndex cleanup_ = 0;
  bool has_cleanup_ = false;

  std::vector<CareRequest> requests_;
  std::vector<ActorId> visited_units_;
  std::vector<ActorId> did_houses_;
  std::vector<ActorId> pending_cascade_;
  std::vector<InfectionLogEntry> hour_log_;
  std::vector<std::pair<std::uint64_t, std::size_t>> hour_order_;
  std::vector<Present> present_;
  std::vector<double> group_hazard_;
  std::vector<NewCase> new_cases_;
  std::vector<Present> candidates_;
  std::vector<double> candidate_hazard_;

  std::vector<ActorId> infected_order_;
  std::vector<std::uint64_t> daily_;
  std::uint64_t infections_ = 0;
  Hour latest_resolution_ = kNever;
  std::uint64_t refusals_ = 0;
  std::uint64_t deactivations_ = 0;
  std::uint64_t cleanup_passes_ = 0;
  LogSink sink_;
  bool started_ = false;
};

}  // namespace microsim
