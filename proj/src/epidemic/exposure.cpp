#include <cmath>

#include "microsim/epidemic.hpp"

namespace microsim {

namespace {

Hour next_of(Hour h, Hour first, Hour second) noexcept {
  const Hour day = h >= 0 ? h / kHoursPerDay : -((-h + kHoursPerDay - 1) / kHoursPerDay);
  const Hour hod = h - day * kHoursPerDay;
  if (hod < first) return day * kHoursPerDay + first;
  if (hod < second) return day * kHoursPerDay + second;
  return (day + 1) * kHoursPerDay + first;
}

}  // namespace

Hour next_movement_hour(Hour h) noexcept { return next_of(h, kMorningMove, kEveningMove); }
Hour next_transmission_hour(Hour h) noexcept { return next_of(h, kMorningTransmit, kEveningTransmit); }

ActorId routine_site(const Person& p, Hour h) noexcept {
  const Hour hod = ((h % kHoursPerDay) + kHoursPerDay) % kHoursPerDay;
  if (!p.workplace.is_none() && hod >= kMorningMove && hod < kEveningMove) return p.workplace;
  return p.home;
}

double risk_from_hazard(double total_hazard) noexcept {
  if (!(total_hazard > 0.0)) return 0.0;
  const double p = -std::expm1(-total_hazard);
  return p < 1.0 ? p : std::nextafter(1.0, 0.0);
}

double compute_risk(std::span<const double> hazards) noexcept {
  double total = 0.0;
  for (double h : hazards) total += h;
  return risk_from_hazard(total);
}

bool exposure_draw(std::uint64_t seed, ActorId person, Hour hour, double p, double vaccination_success) noexcept {
  const double threshold = p * (1.0 - vaccination_success);
  if (!(threshold > 0.0)) return false;
  RngStream rng(seed, person.value(), Purpose::expose, static_cast<std::uint32_t>(hour));
  return rng.uniform() < threshold;
}

InfectionCourse sample_infection_course(const DiseaseProfile& profile, std::uint64_t seed, ActorId person,
                                        Hour hour) {
  InfectionCourse c;
  c.infected_at = hour;
  RngStream latent(seed, person.value(), Purpose::latent, static_cast<std::uint32_t>(hour));
  c.latent_hours = sample_latent_period(profile.latent, latent);
  RngStream fate(seed, person.value(), Purpose::fatality, static_cast<std::uint32_t>(hour));
  for (std::size_t s = 0; s < profile.stages.size(); ++s) {
    if (fate.uniform() < profile.stages[s].fatality_prob) {
      c.death_stage = static_cast<std::int16_t>(s);
      break;
    }
  }
  return c;
}

std::size_t choose_infector(std::uint64_t seed, ActorId infected, Hour hour, std::span<const double> hazards) {
  double total = 0.0;
  for (double h : hazards) total += h;
  RngStream rng(seed, infected.value(), Purpose::infector, static_cast<std::uint32_t>(hour));
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < hazards.size(); ++i) {
    if (hazards[i] <= 0.0) continue;
    acc += hazards[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

void Interventions::validate() const {
  auto check = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError(std::string(what) + " must lie in [0,1], got " + std::to_string(v));
    }
  };
  check(mass_coverage, "mass vaccination coverage");
  check(mass_efficacy, "mass vaccination efficacy");
  check(targeted_coverage, "targeted vaccination coverage");
  check(targeted_efficacy, "targeted vaccination efficacy");
  check(social_distancing, "social distancing factor");
}

void SimulationConfig::validate() const {
  if (horizon <= 0) throw ConfigError("horizon must be positive");
  if (seed_hour != kMorningTransmit && seed_hour != kEveningTransmit) {
    throw ConfigError("seed_hour must be 9 or 17");
  }
  if (seed_hour >= horizon) throw ConfigError("horizon must extend past the seed hour");
  if (house_idle_days < 0) throw ConfigError("house_idle_days must be >= 0");
  if (cleanup_interval <= 0) throw ConfigError("cleanup_interval must be positive");
  if (!(hazard_scale >= 0.0) || !std::isfinite(hazard_scale)) throw ConfigError("hazard_scale must be finite and >= 0");
  interventions.validate();
}

}  // namespace microsim
