#include "microsim/disease_profile.hpp"

#include <algorithm>
#include <cmath>

#include "microsim/ini.hpp"

namespace microsim {

namespace {

void check_prob(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(what + " must lie in [0,1], got " + std::to_string(p));
  }
}

const char* family_name(LatentFamily f) {
  switch (f) {
    case LatentFamily::constant: return "constant";
    case LatentFamily::uniform: return "uniform";
    case LatentFamily::lognormal: return "lognormal";
  }
  return "constant";
}

}  // namespace

double LatentSpec::mean() const {
  switch (family) {
    case LatentFamily::constant: return hours;
    case LatentFamily::uniform: return 0.5 * (min_hours + max_hours);
    case LatentFamily::lognormal: return median_hours * std::exp(0.5 * sigma * sigma);
  }
  return hours;
}

void DiseaseProfile::validate() const {
  switch (latent.family) {
    case LatentFamily::constant:
      if (!(latent.hours >= 1.0)) throw ConfigError("latent hours must be >= 1");
      break;
    case LatentFamily::uniform:
      if (latent.min_hours < 1 || latent.max_hours < latent.min_hours) {
        throw ConfigError("latent uniform range must satisfy 1 <= min_hours <= max_hours");
      }
      break;
    case LatentFamily::lognormal:
      if (!(latent.median_hours > 0.0) || !(latent.sigma >= 0.0)) {
        throw ConfigError("latent lognormal needs median_hours > 0 and sigma >= 0");
      }
      break;
  }
  if (stages.empty()) throw ConfigError("disease profile needs at least one stage");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const std::string tag = "stage " + std::to_string(i + 1) + " ";
    if (s.duration_hours <= 0) throw ConfigError(tag + "duration_hours must be > 0");
    if (!(s.infectiousness >= 0.0) || !std::isfinite(s.infectiousness)) {
      throw ConfigError(tag + "infectiousness must be finite and >= 0");
    }
    check_prob(s.care_seek_er_prob, tag + "care_seek_er_prob");
    check_prob(s.care_seek_did_prob, tag + "care_seek_did_prob");
    check_prob(s.stay_home_prob, tag + "stay_home_prob");
    check_prob(s.fatality_prob, tag + "fatality_prob");
    if (s.care_seek_er_prob + s.care_seek_did_prob + s.stay_home_prob > 1.0 + 1e-12) {
      throw ConfigError(tag + "place probabilities sum above 1");
    }
  }
}

Hour DiseaseProfile::stage_end(std::size_t i) const {
  Hour end = 0;
  for (std::size_t s = 0; s <= i; ++s) end += stages[s].duration_hours;
  return end;
}

DiseaseProfile parse_disease_profile(std::istream& in) {
  const IniDocument doc = parse_ini(in);
  DiseaseProfile p;
  p.name = doc.sections.front().get_string("name", p.name);
  if (const auto* lat = doc.section("latent")) {
    const auto fam = lat->get_string("family", "constant");
    if (fam == "constant") {
      p.latent.family = LatentFamily::constant;
      p.latent.hours = lat->get_double("hours", p.latent.hours);
    } else if (fam == "uniform") {
      p.latent.family = LatentFamily::uniform;
      p.latent.min_hours = static_cast<Hour>(lat->get_int("min_hours", p.latent.min_hours));
      p.latent.max_hours = static_cast<Hour>(lat->get_int("max_hours", p.latent.max_hours));
    } else if (fam == "lognormal") {
      p.latent.family = LatentFamily::lognormal;
      p.latent.median_hours = lat->get_double("median_hours", p.latent.median_hours);
      p.latent.sigma = lat->get_double("sigma", p.latent.sigma);
    } else {
      throw ConfigError("unknown latent family '" + fam + "'");
    }
  }
  for (const auto* sec : doc.all("stage")) {
    DiseaseStage s;
    s.duration_hours = static_cast<Hour>(sec->get_int("duration_hours", s.duration_hours));
    s.infectiousness = sec->get_double("infectiousness", s.infectiousness);
    s.care_seek_er_prob = sec->get_double("care_seek_er_prob", 0.0);
    s.care_seek_did_prob = sec->get_double("care_seek_did_prob", 0.0);
    s.stay_home_prob = sec->get_double("stay_home_prob", 0.0);
    s.fatality_prob = sec->get_double("fatality_prob", 0.0);
    p.stages.push_back(s);
  }
  p.validate();
  return p;
}

void write_disease_profile(std::ostream& out, const DiseaseProfile& p) {
  out << "name = " << p.name << "\n\n[latent]\nfamily = " << family_name(p.latent.family) << "\n";
  switch (p.latent.family) {
    case LatentFamily::constant: out << "hours = " << p.latent.hours << "\n"; break;
    case LatentFamily::uniform:
      out << "min_hours = " << p.latent.min_hours << "\nmax_hours = " << p.latent.max_hours
          << "\n";
      break;
    case LatentFamily::lognormal:
      out << "median_hours = " << p.latent.median_hours << "\nsigma = " << p.latent.sigma << "\n";
      break;
  }
  for (const auto& s : p.stages) {
    out << "\n[stage]\nduration_hours = " << s.duration_hours
        << "\ninfectiousness = " << s.infectiousness
        << "\ncare_seek_er_prob = " << s.care_seek_er_prob
        << "\ncare_seek_did_prob = " << s.care_seek_did_prob
        << "\nstay_home_prob = " << s.stay_home_prob << "\nfatality_prob = " << s.fatality_prob
        << "\n";
  }
}

Hour sample_latent_period(const LatentSpec& spec, RngStream& rng) {
  double hours = spec.hours;
  switch (spec.family) {
    case LatentFamily::constant: break;
    case LatentFamily::uniform:
      return spec.min_hours +
             static_cast<Hour>(rng.below(static_cast<std::uint64_t>(spec.max_hours - spec.min_hours + 1)));
    case LatentFamily::lognormal:
      hours = spec.median_hours * std::exp(spec.sigma * rng.normal());
      break;
  }
  return std::max<Hour>(1, static_cast<Hour>(std::lround(hours)));
}

const char* host_state_name(HostState s) noexcept {
  switch (s) {
    case HostState::susceptible: return "susceptible";
    case HostState::latent: return "latent";
    case HostState::infectious: return "infectious";
    case HostState::recovered: return "recovered";
    case HostState::deceased: return "deceased";
  }
  return "unknown";
}

DiseaseLevel disease_level(const DiseaseProfile& profile, const InfectionCourse& c, Hour now) {
  if (!c.infected() || now < c.infected_at) return {};
  const Hour elapsed = now - c.infected_at;
  if (elapsed < c.latent_hours) return {HostState::latent, -1, 0.0};
  const Hour e = elapsed - c.latent_hours;
  const std::size_t last =
      c.death_stage >= 0 ? static_cast<std::size_t>(c.death_stage) : profile.stages.size() - 1;
  Hour end = 0;
  for (std::size_t s = 0; s <= last; ++s) {
    end += profile.stages[s].duration_hours;
    if (e < end) return {HostState::infectious, static_cast<int>(s), profile.stages[s].infectiousness};
  }
  return {c.death_stage >= 0 ? HostState::deceased : HostState::recovered, -1, 0.0};
}

Hour resolution_hour(const DiseaseProfile& profile, const InfectionCourse& c) {
  const std::size_t last =
      c.death_stage >= 0 ? static_cast<std::size_t>(c.death_stage) : profile.stages.size() - 1;
  return c.infected_at + c.latent_hours + profile.stage_end(last);
}

}  // namespace microsim
