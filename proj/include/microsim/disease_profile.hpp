#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "microsim/error.hpp"
#include "microsim/rng.hpp"

namespace microsim {

enum class LatentFamily : std::uint8_t { constant, uniform, lognormal };

/// How the latent period (infection to infectiousness) is drawn.
struct LatentSpec {
  LatentFamily family = LatentFamily::constant;
  double hours = 48.0;          // constant
  Hour min_hours = 24;          // uniform, inclusive
  Hour max_hours = 72;          // uniform, inclusive
  double median_hours = 48.0;   // lognormal
  double sigma = 0.3;           // lognormal, sd of log-hours

  /// Mean of the underlying distribution (continuous mean for lognormal).
  double mean() const;
};

struct DiseaseStage {
  Hour duration_hours = 24;
  /// Hazard contributed to each co-located group member per transmission event.
  double infectiousness = 0.0;
  double care_seek_er_prob = 0.0;
  double care_seek_did_prob = 0.0;
  double stay_home_prob = 0.0;
  /// Probability of dying at the end of this stage.
  double fatality_prob = 0.0;
};

/// Staged natural history. After the last stage the person is recovered and
/// immune unless a fatality draw ended the course earlier.
struct DiseaseProfile {
  std::string name = "default";
  LatentSpec latent;
  std::vector<DiseaseStage> stages;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  /// End of stage i, in hours after the latent period.
  Hour stage_end(std::size_t i) const;
  Hour infectious_hours() const { return stages.empty() ? 0 : stage_end(stages.size() - 1); }
};

DiseaseProfile parse_disease_profile(std::istream& in);
void write_disease_profile(std::ostream& out, const DiseaseProfile& profile);

/// Positive number of hours; uses as many draws from `rng` as the family needs.
Hour sample_latent_period(const LatentSpec& spec, RngStream& rng);

enum class HostState : std::uint8_t { susceptible, latent, infectious, recovered, deceased };

const char* host_state_name(HostState s) noexcept;

inline constexpr Hour kNever = std::numeric_limits<Hour>::min();

/// Everything that decides a person's disease course, fixed at infection.
struct InfectionCourse {
  Hour infected_at = kNever;
  Hour latent_hours = 0;
  /// Stage at whose end the person dies, or -1 for recovery.
  std::int16_t death_stage = -1;

  bool infected() const noexcept { return infected_at != kNever; }
};

struct DiseaseLevel {
  HostState state = HostState::susceptible;
  int stage = -1;
  double infectiousness = 0.0;
};

DiseaseLevel disease_level(const DiseaseProfile& profile, const InfectionCourse& course, Hour now);

/// First hour at which the person is recovered or deceased.
Hour resolution_hour(const DiseaseProfile& profile, const InfectionCourse& course);

}  // namespace microsim
