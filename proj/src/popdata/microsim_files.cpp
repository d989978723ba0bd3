#include <algorithm>
#include <map>
#include <unordered_map>

#include "microsim/binary_io.hpp"
#include "microsim/error.hpp"
#include "microsim/popdata.hpp"

namespace microsim {

namespace {

constexpr std::string_view kPopMagic{"MSIMPOP\0", 8};
constexpr std::string_view kWorkMagic{"MSIMWRK\0", 8};
constexpr std::string_view kXyMagic{"MSIMXY\0\0", 8};
constexpr std::size_t kPopRowBytes = 8 + 1 + 2 + 8 + 8 + 8 + 2 + 2;
constexpr std::size_t kWorkRowBytes = 8 + 8 + 4 + 2 + 2 + 1;
constexpr std::size_t kXyRowBytes = 4 + 4 + 4;
constexpr std::size_t kXyExtraHeader = 8;

struct PendingWorkplace {
  WorkplaceRecord record;
  bool seen = false;
};

}  // namespace

WorkplaceType workplace_type_for_school(std::optional<SchoolType> t) noexcept {
  if (!t) return WorkplaceType::other_school;
  switch (*t) {
    case SchoolType::D: return WorkplaceType::daycare;
    case SchoolType::L:
    case SchoolType::M:
    case SchoolType::H: return WorkplaceType::school;
    case SchoolType::HSK: return WorkplaceType::college;
  }
  return WorkplaceType::other_school;
}

MicroSimFiles build_microsim_files(const std::vector<BaseFileRow>& rows, const BuildOptions& options) {
  MicroSimFiles out;
  std::map<std::uint64_t, WorkplaceRecord> workplaces;
  std::vector<std::uint64_t> squares;
  squares.reserve(rows.size() * 2);
  out.persons.reserve(rows.size());

  auto register_site = [&](std::uint64_t id, std::uint64_t square, std::uint16_t branch,
                           std::uint16_t mun, WorkplaceType type, std::uint64_t ind_id) {
    auto [it, inserted] = workplaces.try_emplace(id);
    WorkplaceRecord& w = it->second;
    if (inserted) {
      w.workplace_id = id;
      w.wp_square = square;
      w.branch_code = branch;
      w.wp_mun = mun;
      w.wp_type = type;
      squares.push_back(square);
    } else if (w.wp_square != square) {
      out.exceptions.push_back("person " + std::to_string(ind_id) + ": workplace " +
                               std::to_string(id) + " listed at square " + std::to_string(square) +
                               ", keeping " + std::to_string(w.wp_square));
    }
    ++w.no_of_employees;
  };

  for (const auto& row : rows) {
    if (!row.dw_square) {
      out.exceptions.push_back("person " + std::to_string(row.ind_id) + ": no dwelling square, dropped");
      continue;
    }
    const std::int32_t age = options.reference_year - row.birth_y;
    if (age < 0 || age > 0xFFFF) {
      out.exceptions.push_back("person " + std::to_string(row.ind_id) + ": birth year " +
                               std::to_string(row.birth_y) + " after reference year, dropped");
      continue;
    }
    PersonRecord p;
    p.ind_id = row.ind_id;
    p.sex = row.sex;
    p.age = static_cast<std::uint16_t>(age);
    p.fam_id = row.fam_id;
    p.dwelling_square = *row.dw_square;
    p.ind_municipality = region_of_square(split_coords(*row.dw_square));
    squares.push_back(*row.dw_square);

    bool placed = false;
    if (row.workplace_id) {
      if (row.wp_square) {
        const auto branch = static_cast<std::uint16_t>(row.wp_branchcode.value_or(0));
        const std::uint16_t mun = row.wp_mun.value_or(region_of_square(split_coords(*row.wp_square)));
        register_site(*row.workplace_id, *row.wp_square, branch, mun, WorkplaceType::workplace,
                      row.ind_id);
        p.workplace_id = *row.workplace_id;
        p.branch_code = branch;
        placed = true;
      } else {
        out.exceptions.push_back("person " + std::to_string(row.ind_id) + ": workplace " +
                                 std::to_string(*row.workplace_id) + " has no square");
      }
    }
    if (!placed && row.school_id && row.school_square) {
      const std::uint64_t id = kSchoolIdOffset + *row.school_id;
      register_site(id, *row.school_square, 0, region_of_square(split_coords(*row.school_square)),
                    workplace_type_for_school(row.school_type), row.ind_id);
      p.workplace_id = id;
    }
    out.persons.push_back(p);
  }

  std::sort(squares.begin(), squares.end());
  squares.erase(std::unique(squares.begin(), squares.end()), squares.end());
  out.xy.reserve(squares.size());
  for (std::size_t i = 0; i < squares.size(); ++i) {
    const Coord c = split_coords(squares[i]);
    out.xy.push_back({static_cast<std::uint32_t>(i), c.east, c.north});
  }
  out.workplaces.reserve(workplaces.size());
  for (auto& [id, w] : workplaces) out.workplaces.push_back(w);
  return out;
}

void write_popfile(std::ostream& out, const std::vector<PersonRecord>& records) {
  binio::Writer w;
  w.header(kPopMagic, records.size());
  for (const auto& r : records) {
    w.u64(r.ind_id);
    w.u8(r.sex);
    w.u16(r.age);
    w.u64(r.fam_id);
    w.u64(r.dwelling_square);
    w.u64(r.workplace_id);
    w.u16(r.branch_code);
    w.u16(r.ind_municipality);
  }
  w.flush_to(out);
}

std::vector<PersonRecord> read_popfile(std::istream& in) {
  binio::Reader r(in);
  const std::uint64_t n = r.header(kPopMagic, "popfile", 0, kPopRowBytes);
  std::vector<PersonRecord> out(n);
  for (auto& p : out) {
    p.ind_id = r.u64();
    p.sex = r.u8();
    p.age = r.u16();
    p.fam_id = r.u64();
    p.dwelling_square = r.u64();
    p.workplace_id = r.u64();
    p.branch_code = r.u16();
    p.ind_municipality = r.u16();
  }
  return out;
}

void write_workplacefile(std::ostream& out, const std::vector<WorkplaceRecord>& records) {
  binio::Writer w;
  w.header(kWorkMagic, records.size());
  for (const auto& r : records) {
    w.u64(r.workplace_id);
    w.u64(r.wp_square);
    w.u32(r.no_of_employees);
    w.u16(r.branch_code);
    w.u16(r.wp_mun);
    w.u8(static_cast<std::uint8_t>(r.wp_type));
  }
  w.flush_to(out);
}

std::vector<WorkplaceRecord> read_workplacefile(std::istream& in) {
  binio::Reader r(in);
  const std::uint64_t n = r.header(kWorkMagic, "workplacefile", 0, kWorkRowBytes);
  std::vector<WorkplaceRecord> out(n);
  for (auto& w : out) {
    w.workplace_id = r.u64();
    w.wp_square = r.u64();
    w.no_of_employees = r.u32();
    w.branch_code = r.u16();
    w.wp_mun = r.u16();
    const std::uint8_t type = r.u8();
    if (type < 1 || type > 5) {
      throw FormatError("workplacefile: wp_type " + std::to_string(type) + " not in 1..5", r.position());
    }
    w.wp_type = static_cast<WorkplaceType>(type);
  }
  return out;
}

void write_xyfile(std::ostream& out, const std::vector<XYRecord>& records) {
  Coord origin{};
  if (!records.empty()) {
    origin = {records.front().east, records.front().north};
    for (const auto& r : records) {
      origin.east = std::min(origin.east, r.east);
      origin.north = std::min(origin.north, r.north);
    }
  }
  binio::Writer w;
  w.header(kXyMagic, records.size());
  w.u32(origin.east);
  w.u32(origin.north);
  for (const auto& r : records) {
    w.u32(r.xy_index);
    w.u32(r.east);
    w.u32(r.north);
  }
  w.flush_to(out);
}

XyTable read_xyfile(std::istream& in) {
  binio::Reader r(in);
  const std::uint64_t n = r.header(kXyMagic, "xyfile", kXyExtraHeader, kXyRowBytes);
  XyTable t;
  t.origin.east = r.u32();
  t.origin.north = r.u32();
  t.records.resize(n);
  for (auto& x : t.records) {
    x.xy_index = r.u32();
    x.east = r.u32();
    x.north = r.u32();
  }
  return t;
}

}  // namespace microsim
