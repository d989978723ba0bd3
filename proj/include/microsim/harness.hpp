#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "microsim/disease_profile.hpp"
#include "microsim/epidemic.hpp"
#include "microsim/geography.hpp"
#include "microsim/popdata.hpp"
#include "microsim/population.hpp"

namespace microsim {

struct RunPaths {
  std::filesystem::path base_file;
  std::filesystem::path popfile;
  std::filesystem::path workplacefile;
  std::filesystem::path xyfile;
  std::filesystem::path caremap;
  /// Empty means the built-in default profile.
  std::filesystem::path disease_profile;
  std::filesystem::path log;
};

/// Everything one config file describes. Relative paths are resolved
/// against the directory of the config file.
struct RunConfig {
  RunPaths files;
  SimulationConfig sim;
  PopulationOptions population;
  OutbreakSpec outbreak;
  std::size_t log_batch = 1024;
  SynthConfig synth;

  void validate() const;
};

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Influenza-like two-stage profile used when no profile file is given.
DiseaseProfile default_disease_profile();

/// The three MicroSim files plus care map and profile, cross-validated.
struct LoadedData {
  std::vector<PersonRecord> persons;
  std::vector<WorkplaceRecord> workplaces;
  XyTable xy;
  GridIndex grid;
  CareUnitMap care;
  DiseaseProfile profile;
};

/// Throws Error naming the missing or inconsistent file.
LoadedData load_data(const RunConfig& cfg);
/// Builds in-memory data straight from a synthetic configuration.
LoadedData synthesize_data(const SynthConfig& synth, const PopulationOptions& options,
                           const DiseaseProfile& profile);

Simulation make_simulation(const LoadedData& data, const RunConfig& cfg);

struct SynthReport {
  std::uint64_t persons = 0;
  std::uint64_t workplaces = 0;
  std::uint64_t squares = 0;
  std::uint64_t care_units = 0;
  std::vector<std::string> exceptions;
};

SynthReport cmd_synth(const RunConfig& cfg);

struct RunResult {
  RunSummary summary;
  std::uint64_t log_entries = 0;
};

/// Seeds the outbreak, runs, and writes the log (with header) to `log`.
RunResult run_simulation(const LoadedData& data, const RunConfig& cfg, std::ostream& log,
                         std::ostream* trace = nullptr);
/// Loads data, runs, writes the log file, prints the summary to `report`.
RunResult cmd_run(const RunConfig& cfg, std::ostream& report, std::ostream* trace = nullptr);

struct ReplicateReport {
  std::vector<std::uint64_t> seeds;
  std::vector<RunSummary> runs;
  double mean_attack_rate = 0.0;
  double sd_attack_rate = 0.0;
};

/// Runs seeds cfg.sim.seed .. cfg.sim.seed + n - 1 on `parallelism`
/// threads. With `write_logs` each replicate writes <log>.<seed>.
ReplicateReport cmd_replicates(const RunConfig& cfg, std::uint32_t n, std::uint32_t parallelism,
                               bool write_logs = false, std::ostream* report = nullptr);
ReplicateReport run_replicates(const LoadedData& data, const RunConfig& cfg, std::uint32_t n,
                               std::uint32_t parallelism,
                               const std::optional<std::filesystem::path>& log_prefix = std::nullopt);

std::filesystem::path replicate_log_path(const std::filesystem::path& log, std::uint64_t seed);

struct PlotReport {
  std::filesystem::path incidence_csv;
  std::filesystem::path place_csv;
  std::filesystem::path incidence_svg;
  std::filesystem::path place_svg;
  std::uint64_t entries = 0;
};

/// incidence.csv, place_types.csv and two SVG charts in `out_dir`.
PlotReport cmd_plot(const std::filesystem::path& log_path, const std::filesystem::path& out_dir);

std::string format_summary(const RunSummary& s);

}  // namespace microsim
