#pragma once

#include <cstdint>
#include <optional>

namespace microsim {

enum class SchoolType : std::uint8_t { D, L, M, H, HSK };

/// WPType codes of the employment register.
enum class WorkplaceType : std::uint8_t {
  daycare = 1,
  school = 2,   // ages 6-16
  college = 3,  // ages 16-19
  other_school = 4,
  workplace = 5,
};

/// One individual of the compiled register base file.
struct BaseFileRow {
  std::uint64_t ind_id = 0;
  std::int32_t birth_y = 0;
  std::uint8_t sex = 1;       // 1 = male, 2 = female
  std::uint8_t fam_type = 5;  // 1..5
  std::optional<std::uint64_t> dw_square;
  std::optional<std::uint64_t> wp_square;
  std::optional<std::uint64_t> school_square;
  std::uint64_t fam_id = 0;
  std::optional<std::uint64_t> workplace_id;
  std::optional<std::uint32_t> wp_branchcode;
  std::optional<std::uint16_t> wp_mun;
  std::optional<std::uint64_t> company_id;
  std::optional<std::uint64_t> school_id;
  std::optional<SchoolType> school_type;
  std::optional<std::uint64_t> father_id;
  std::optional<std::uint64_t> mother_id;

  friend bool operator==(const BaseFileRow&, const BaseFileRow&) = default;
};

/// popfile row. Zero encodes "absent" for workplace_id and branch_code.
struct PersonRecord {
  std::uint64_t ind_id = 0;
  std::uint8_t sex = 1;
  std::uint16_t age = 0;
  std::uint64_t fam_id = 0;
  std::uint64_t dwelling_square = 0;
  std::uint64_t workplace_id = 0;
  std::uint16_t branch_code = 0;
  std::uint16_t ind_municipality = 0;

  friend bool operator==(const PersonRecord&, const PersonRecord&) = default;
};

struct WorkplaceRecord {
  std::uint64_t workplace_id = 0;
  std::uint64_t wp_square = 0;
  std::uint32_t no_of_employees = 0;
  std::uint16_t branch_code = 0;
  std::uint16_t wp_mun = 0;
  WorkplaceType wp_type = WorkplaceType::workplace;

  friend bool operator==(const WorkplaceRecord&, const WorkplaceRecord&) = default;
};

struct XYRecord {
  std::uint32_t xy_index = 0;
  std::uint32_t east = 0;
  std::uint32_t north = 0;

  friend bool operator==(const XYRecord&, const XYRecord&) = default;
};

}  // namespace microsim
