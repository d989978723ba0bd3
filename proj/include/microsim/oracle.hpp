#pragma once

#include <cstdint>
#include <vector>

#include "microsim/disease_profile.hpp"

namespace microsim {

/// Random-mixing reference: one fully mixed group of n persons exposed at
/// 9 and 17 o'clock with the same hazard form and keyed draws as the engine.
struct SirParams {
  std::uint32_t n = 1000;
  /// Persons 0..initial_infected-1 are infected at seed_hour.
  std::uint32_t initial_infected = 1;
  /// Natural history; the stage infectiousness is the per-event hazard.
  DiseaseProfile profile;
  Hour seed_hour = 9;
  Hour horizon = 8760;
  double hazard_scale = 1.0;

  void validate() const;
};

/// Profile with a constant latent period and one infectious stage.
DiseaseProfile single_stage_profile(double hazard, Hour latent_hours, Hour infectious_hours);

/// Per-event hazard at which one infectious person exposed to `contacts`
/// others over `events` transmission events infects `r` of them on average.
double hazard_for_reproduction(double r, std::uint32_t contacts, int events);

struct SirRun {
  /// Infection hour of person i, or kNever.
  std::vector<Hour> infection_hour;
  std::uint32_t infected = 0;
  double attack_rate = 0.0;
};

SirRun stochastic_sir(const SirParams& params, std::uint64_t seed);
/// Final attack rates of replicates run with seeds seed, seed+1, ...
std::vector<double> stochastic_sir(const SirParams& params, std::uint64_t seed, std::uint32_t replicates);

/// Root of z = 1 - exp(-r0 z) in [0, 1) by bisection to 1e-10; 0 for r0 <= 1.
double final_size(double r0);

}  // namespace microsim
