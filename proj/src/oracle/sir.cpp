#include <algorithm>
#include <cmath>

#include "microsim/actor_id.hpp"
#include "microsim/epidemic.hpp"
#include "microsim/oracle.hpp"

namespace microsim {

void SirParams::validate() const {
  if (n < 1) throw ConfigError("oracle population must be >= 1");
  if (initial_infected > n) throw ConfigError("initial infected exceeds the population");
  if (!(hazard_scale >= 0.0)) throw ConfigError("hazard_scale must be >= 0");
  profile.validate();
}

DiseaseProfile single_stage_profile(double hazard, Hour latent_hours, Hour infectious_hours) {
  DiseaseProfile p;
  p.name = "single-stage";
  p.latent.family = LatentFamily::constant;
  p.latent.hours = latent_hours;
  DiseaseStage s;
  s.duration_hours = infectious_hours;
  s.infectiousness = hazard;
  p.stages.push_back(s);
  p.validate();
  return p;
}

double hazard_for_reproduction(double r, std::uint32_t contacts, int events) {
  if (contacts == 0 || events <= 0) throw ConfigError("need at least one contact and one event");
  const double per_contact = r / contacts;
  if (!(per_contact >= 0.0 && per_contact < 1.0)) throw ConfigError("reproduction number too large for the group");
  return -std::log1p(-per_contact) / events;
}

SirRun stochastic_sir(const SirParams& params, std::uint64_t seed) {
  params.validate();
  const DiseaseProfile& prof = params.profile;
  SirRun run;
  run.infection_hour.assign(params.n, kNever);
  std::vector<InfectionCourse> course(params.n);
  Hour latest = kNever;
  auto infect = [&](std::uint32_t i, Hour h) {
    course[i] = sample_infection_course(prof, seed, person_id(i), h);
    run.infection_hour[i] = h;
    latest = std::max(latest, resolution_hour(prof, course[i]));
    ++run.infected;
  };
  for (std::uint32_t i = 0; i < params.initial_infected; ++i) infect(i, params.seed_hour);

  std::vector<std::uint32_t> infectious;
  std::vector<std::uint32_t> newly;
  for (Hour h = next_transmission_hour(params.seed_hour); h < params.horizon && h <= latest;
       h = next_transmission_hour(h)) {
    double total = 0.0;
    for (std::uint32_t i = 0; i < params.n; ++i) {
      if (!course[i].infected()) continue;
      const DiseaseLevel lvl = disease_level(prof, course[i], h);
      if (lvl.state == HostState::infectious) total += lvl.infectiousness * params.hazard_scale;
    }
    if (total <= 0.0) continue;
    const double p = risk_from_hazard(total);
    newly.clear();
    for (std::uint32_t i = 0; i < params.n; ++i) {
      if (!course[i].infected() && exposure_draw(seed, person_id(i), h, p, 0.0)) newly.push_back(i);
    }
    for (std::uint32_t i : newly) infect(i, h);
  }
  run.attack_rate = static_cast<double>(run.infected) / params.n;
  return run;
}

std::vector<double> stochastic_sir(const SirParams& params, std::uint64_t seed, std::uint32_t replicates) {
  std::vector<double> out;
  out.reserve(replicates);
  for (std::uint32_t r = 0; r < replicates; ++r) out.push_back(stochastic_sir(params, seed + r).attack_rate);
  return out;
}

double final_size(double r0) {
  if (!(r0 > 1.0)) return 0.0;
  auto f = [r0](double z) { return z - 1.0 + std::exp(-r0 * z); };
  // f < 0 just above 0 for r0 > 1 and f(1) > 0.
  double lo = std::min(1e-12, 0.5 * (r0 - 1.0) / r0);
  while (f(lo) >= 0.0 && lo > 1e-300) lo *= 0.5;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace microsim
