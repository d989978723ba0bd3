#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "microsim/error.hpp"
#include "microsim/geography.hpp"
#include "microsim/records.hpp"

namespace microsim {

// ---------------------------------------------------------------------------
// Base file (tab-separated register extract)

/// Column order of the base file, one row per individual.
inline constexpr const char* kBaseFileColumns[] = {
    "IndID",      "BirthY",    "Sex",       "FamType",  "DwSquare",   "WPSquare",
    "SchoolSquare", "FamID",   "WorkplaceID", "WPbranchcode", "WPmun", "CompanyID",
    "SchoolID",   "SchoolType", "FatherID", "MotherID"};
inline constexpr std::size_t kBaseFileColumnCount = 16;

struct BaseFileOptions {
  bool has_header = false;
  /// Throw on the first invalid row instead of collecting it in `rejected`.
  bool strict = true;
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct BaseFileParse {
  std::vector<BaseFileRow> rows;
  std::vector<RejectedRow> rejected;
};

BaseFileParse parse_base_file(std::istream& in, const BaseFileOptions& options = {});
void write_base_file(std::ostream& out, const std::vector<BaseFileRow>& rows, bool header = true);

/// Throws FormatError (position = 0) describing the first violated invariant.
void validate_row(const BaseFileRow& row);

const char* school_type_name(SchoolType t) noexcept;

// ---------------------------------------------------------------------------
// MicroSim input files

/// Workplace ids given to school rows, keeping them apart from employer ids.
inline constexpr std::uint64_t kSchoolIdOffset = 1'000'000'000'000ULL;

struct BuildOptions {
  std::int32_t reference_year = 2002;
};

struct MicroSimFiles {
  std::vector<PersonRecord> persons;
  std::vector<WorkplaceRecord> workplaces;
  std::vector<XYRecord> xy;
  /// Non-fatal data problems (missing squares, conflicting workplace data).
  std::vector<std::string> exceptions;
};

MicroSimFiles build_microsim_files(const std::vector<BaseFileRow>& rows,
                                   const BuildOptions& options = {});

WorkplaceType workplace_type_for_school(std::optional<SchoolType> t) noexcept;

void write_popfile(std::ostream& out, const std::vector<PersonRecord>& records);
std::vector<PersonRecord> read_popfile(std::istream& in);
void write_workplacefile(std::ostream& out, const std::vector<WorkplaceRecord>& records);
std::vector<WorkplaceRecord> read_workplacefile(std::istream& in);

struct XyTable {
  /// Compression origin: minimum east and north over the records.
  Coord origin;
  std::vector<XYRecord> records;
};

void write_xyfile(std::ostream& out, const std::vector<XYRecord>& records);
XyTable read_xyfile(std::istream& in);

// ---------------------------------------------------------------------------
// Synthetic population

struct SchoolBand {
  std::uint16_t min_age = 0;
  std::uint16_t max_age = 0;  // inclusive
  WorkplaceType wp_type = WorkplaceType::school;
  std::uint32_t school_size = 300;
};

struct SynthConfig {
  std::uint64_t n_persons = 10'000;
  /// Entry i is the probability of a household of size i+1.
  std::vector<double> household_size_distribution{0.40, 0.30, 0.15, 0.10, 0.05};
  /// Entry i is the probability of a workplace of size i+1. Empty means
  /// log-uniform on 1..workplace_size_max.
  std::vector<double> workplace_size_distribution;
  std::uint32_t workplace_size_max = 500;
  std::vector<SchoolBand> school_age_bands{
      {1, 5, WorkplaceType::daycare, 60},
      {6, 15, WorkplaceType::school, 300},
      {16, 18, WorkplaceType::college, 500},
  };
  /// Ages are uniform on [0, max_age).
  std::uint16_t max_age = 90;
  std::uint16_t working_age_min = 19;
  std::uint16_t working_age_max = 65;
  double employment_rate = 0.8;
  std::uint32_t east_min = 1'500'000;
  std::uint32_t east_max = 1'700'000;
  std::uint32_t north_min = 6'500'000;
  std::uint32_t north_max = 6'700'000;
  double occupied_square_fraction = 0.05;
  /// One hospital workplace (hosting an ER and a DID) per this many persons.
  std::uint64_t persons_per_hospital = 50'000;
  std::uint16_t hospital_branch_code = 8511;
  std::int32_t reference_year = 2002;
  std::uint64_t rng_seed = 1;

  /// Throws ConfigError.
  void validate() const;
  std::vector<double> resolved_workplace_sizes() const;
  std::uint64_t total_squares() const;
  std::uint64_t occupied_squares() const;
};

/// Sorted, distinct occupied squares of the synthetic grid.
std::vector<Coord> synthesize_occupied_squares(const SynthConfig& cfg);

std::vector<BaseFileRow> synthesize_population(const SynthConfig& cfg);

}  // namespace microsim
