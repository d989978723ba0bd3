#include <fstream>

#include "microsim/harness.hpp"
#include "microsim/ini.hpp"

namespace microsim {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const IniSection* s, std::string_view key, const fs::path& base) {
  if (!s) return {};
  const auto v = s->find(key);
  if (!v || v->empty()) return {};
  fs::path p(*v);
  return p.is_absolute() || base.empty() ? p : base / p;
}

template <class T>
T ranged(const IniSection& s, std::string_view key, T fallback, std::int64_t lo, std::int64_t hi) {
  const std::int64_t v = s.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < lo || v > hi) {
    throw ConfigError("[" + s.name + "] " + std::string(key) + " must lie in " + std::to_string(lo) + ".." +
                      std::to_string(hi) + ", got " + std::to_string(v));
  }
  return static_cast<T>(v);
}

void parse_synth(const IniSection& s, SynthConfig& c) {
  c.n_persons = s.get_uint("n_persons", c.n_persons);
  c.household_size_distribution = s.get_doubles("household_sizes", c.household_size_distribution);
  c.workplace_size_distribution = s.get_doubles("workplace_sizes", c.workplace_size_distribution);
  c.workplace_size_max = ranged<std::uint32_t>(s, "workplace_size_max", c.workplace_size_max, 1, 1'000'000);
  c.max_age = ranged<std::uint16_t>(s, "max_age", c.max_age, 1, 130);
  c.working_age_min = ranged<std::uint16_t>(s, "working_age_min", c.working_age_min, 0, 130);
  c.working_age_max = ranged<std::uint16_t>(s, "working_age_max", c.working_age_max, 0, 130);
  c.employment_rate = s.get_double("employment_rate", c.employment_rate);
  c.east_min = ranged<std::uint32_t>(s, "east_min", c.east_min, 1'000'000, 9'999'999);
  c.east_max = ranged<std::uint32_t>(s, "east_max", c.east_max, 1'000'000, 9'999'999);
  c.north_min = ranged<std::uint32_t>(s, "north_min", c.north_min, 1'000'000, 9'999'999);
  c.north_max = ranged<std::uint32_t>(s, "north_max", c.north_max, 1'000'000, 9'999'999);
  c.occupied_square_fraction = s.get_double("occupied_fraction", c.occupied_square_fraction);
  c.persons_per_hospital = s.get_uint("persons_per_hospital", c.persons_per_hospital);
  c.hospital_branch_code = ranged<std::uint16_t>(s, "hospital_branch_code", c.hospital_branch_code, 1, 65535);
  c.reference_year = ranged<std::int32_t>(s, "reference_year", c.reference_year, 1800, 2200);
  c.rng_seed = s.get_uint("seed", c.rng_seed);
}

}  // namespace

void RunConfig::validate() const {
  sim.validate();
  if (population.department_size == 0) throw ConfigError("department_size must be positive");
  if (log_batch == 0) throw ConfigError("log_batch must be positive");
}

RunConfig parse_run_config(std::istream& in, const fs::path& base_dir) {
  const IniDocument doc = parse_ini(in);
  RunConfig c;
  static const IniSection empty;

  const IniSection* files = doc.section("files");
  c.files.base_file = resolve(files, "base_file", base_dir);
  c.files.popfile = resolve(files, "popfile", base_dir);
  c.files.workplacefile = resolve(files, "workplacefile", base_dir);
  c.files.xyfile = resolve(files, "xyfile", base_dir);
  c.files.caremap = resolve(files, "caremap", base_dir);
  c.files.disease_profile = resolve(files, "disease_profile", base_dir);
  c.files.log = resolve(files, "log", base_dir);

  const IniSection& run = doc.section("run") ? *doc.section("run") : empty;
  c.sim.seed = run.get_uint("seed", c.sim.seed);
  c.sim.horizon = ranged<Hour>(run, "horizon_hours", c.sim.horizon, 1, 24 * 365 * 20);
  c.sim.optimize = run.get_bool("optimize", c.sim.optimize);
  c.sim.house_idle_days = ranged<int>(run, "house_idle_days", c.sim.house_idle_days, 0, 365);
  c.sim.cleanup_interval = ranged<Hour>(run, "cleanup_interval_hours", c.sim.cleanup_interval, 1, 24 * 365);
  c.sim.seed_hour = ranged<Hour>(run, "seed_hour", c.sim.seed_hour, 9, 17);
  c.sim.hazard_scale = run.get_double("hazard_scale", c.sim.hazard_scale);
  c.sim.visitors_per_patient = ranged<std::uint32_t>(run, "visitors_per_patient", c.sim.visitors_per_patient, 0, 100);
  c.sim.running_limit = run.get_uint("running_limit", c.sim.running_limit);
  c.sim.cleanup_limit = run.get_uint("cleanup_limit", c.sim.cleanup_limit);
  c.sim.stop_at_extinction = run.get_bool("stop_at_extinction", c.sim.stop_at_extinction);
  c.population.department_size =
      ranged<std::uint16_t>(run, "department_size", c.population.department_size, 1, 65535);
  c.population.er_capacity = ranged<std::uint32_t>(run, "er_capacity", c.population.er_capacity, 0, 1'000'000);
  c.population.did_capacity = ranged<std::uint32_t>(run, "did_capacity", c.population.did_capacity, 0, 1'000'000);
  c.population.hospital_branch_code =
      ranged<std::uint16_t>(run, "hospital_branch_code", c.population.hospital_branch_code, 1, 65535);
  c.log_batch = run.get_uint("log_batch", c.log_batch);

  if (const IniSection* ob = doc.section("outbreak")) {
    c.outbreak.ind_ids = ob->get_uints("ind_ids");
    c.outbreak.count = ob->get_uint("count", 0);
    if (ob->has("region")) c.outbreak.region = ranged<std::uint16_t>(*ob, "region", 0, 1, 65535);
    c.outbreak.seed = ob->get_uint("seed", 0);
  }
  if (const IniSection* iv = doc.section("interventions")) {
    auto& v = c.sim.interventions;
    v.mass_coverage = iv->get_double("mass_coverage", v.mass_coverage);
    v.mass_efficacy = iv->get_double("mass_efficacy", v.mass_efficacy);
    v.targeted_coverage = iv->get_double("targeted_coverage", v.targeted_coverage);
    v.targeted_efficacy = iv->get_double("targeted_efficacy", v.targeted_efficacy);
    v.isolation = iv->get_bool("isolation", v.isolation);
    v.social_distancing = iv->get_double("social_distancing", v.social_distancing);
  }
  if (const IniSection* sy = doc.section("synth")) parse_synth(*sy, c.synth);
  c.synth.hospital_branch_code = c.population.hospital_branch_code;
  if (const IniSection* sy = doc.section("synth"); sy && sy->has("hospital_branch_code")) {
    c.synth.hospital_branch_code = ranged<std::uint16_t>(*sy, "hospital_branch_code", 8511, 1, 65535);
    c.population.hospital_branch_code = c.synth.hospital_branch_code;
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_run_config(in, path.parent_path());
}

DiseaseProfile default_disease_profile() {
  DiseaseProfile p;
  p.name = "influenza-like";
  p.latent.family = LatentFamily::lognormal;
  p.latent.median_hours = 36;
  p.latent.sigma = 0.3;
  DiseaseStage early;
  early.duration_hours = 24;
  early.infectiousness = 0.08;
  early.stay_home_prob = 0.2;
  early.care_seek_er_prob = 0.01;
  DiseaseStage late;
  late.duration_hours = 72;
  late.infectiousness = 0.04;
  late.stay_home_prob = 0.6;
  late.care_seek_er_prob = 0.03;
  late.care_seek_did_prob = 0.02;
  late.fatality_prob = 0.002;
  p.stages = {early, late};
  p.validate();
  return p;
}

namespace {

template <class T, class F>
T read_file(const fs::path& path, const char* what, F&& reader) {
  if (path.empty()) throw ConfigError(std::string("config does not name a ") + what);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(std::string("cannot open ") + what + " " + path.string());
  try {
    return reader(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace

LoadedData load_data(const RunConfig& cfg) {
  LoadedData d;
  d.persons = read_file<std::vector<PersonRecord>>(cfg.files.popfile, "popfile", read_popfile);
  d.workplaces = read_file<std::vector<WorkplaceRecord>>(cfg.files.workplacefile, "workplacefile", read_workplacefile);
  d.xy = read_file<XyTable>(cfg.files.xyfile, "xyfile", read_xyfile);
  d.grid = GridIndex::build(d.xy.records);
  if (!cfg.files.caremap.empty()) {
    d.care = read_file<CareUnitMap>(cfg.files.caremap, "care map", read_care_map);
    if (d.care.size() != d.grid.size()) {
      throw Error("care map covers " + std::to_string(d.care.size()) + " squares but the xyfile has " +
                  std::to_string(d.grid.size()));
    }
  }
  if (cfg.files.disease_profile.empty()) {
    d.profile = default_disease_profile();
  } else {
    d.profile = read_file<DiseaseProfile>(cfg.files.disease_profile, "disease profile", parse_disease_profile);
  }
  for (const auto& p : d.persons) {
    if (!d.grid.find_combined(p.dwelling_square)) {
      throw Error("person " + std::to_string(p.ind_id) + " lives in square " + std::to_string(p.dwelling_square) +
                  " missing from the xyfile");
    }
  }
  return d;
}

LoadedData synthesize_data(const SynthConfig& synth, const PopulationOptions& options,
                           const DiseaseProfile& profile) {
  LoadedData d;
  SynthConfig s = synth;
  s.hospital_branch_code = options.hospital_branch_code;
  BuildOptions bo;
  bo.reference_year = s.reference_year;
  MicroSimFiles files = build_microsim_files(synthesize_population(s), bo);
  d.persons = std::move(files.persons);
  d.workplaces = std::move(files.workplaces);
  d.xy.records = std::move(files.xy);
  d.grid = GridIndex::build(d.xy.records);
  d.xy.origin = d.grid.origin();
  const Population pop = Population::build(d.persons, d.workplaces, d.grid, options);
  if (!pop.er_units().empty()) d.care = precompute_care_map(d.grid, pop.er_units(), pop.did_units());
  d.profile = profile;
  return d;
}

Simulation make_simulation(const LoadedData& data, const RunConfig& cfg) {
  Population pop = Population::build(data.persons, data.workplaces, data.grid, cfg.population);
  for (const CareAssignment& a : data.care.entries()) {
    for (ActorId unit : {a.er, a.did}) {
      if (unit.index() >= pop.houses().size() || !unit.is_care_unit() ||
          pop.house(unit).house_type != unit.kind()) {
        throw Error("care map references house " + std::to_string(unit.value()) +
                    ", which is not a care unit of this population");
      }
    }
  }
  return Simulation(std::move(pop), data.grid, data.care, data.profile, cfg.sim);
}

}  // namespace microsim
