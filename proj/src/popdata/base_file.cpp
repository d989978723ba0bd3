#include <charconv>
#include <string>
#include <string_view>

#include "microsim/error.hpp"
#include "microsim/popdata.hpp"

namespace microsim {

namespace {

template <class T>
T parse_uint_field(std::string_view s, const char* column) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError(std::string(column) + ": '" + std::string(s) + "' is not a valid integer");
  }
  return v;
}

template <class T>
std::optional<T> opt_field(std::string_view s, const char* column) {
  if (s.empty()) return std::nullopt;
  return parse_uint_field<T>(s, column);
}

std::optional<std::uint64_t> coord_field(std::string_view s, const char* column) {
  if (s.empty()) return std::nullopt;
  if (s.size() != 14) {
    throw FormatError(std::string(column) + ": combined coordinate '" + std::string(s) +
                      "' must have exactly 14 digits");
  }
  return parse_uint_field<std::uint64_t>(s, column);
}

std::optional<SchoolType> school_type_field(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s == "D") return SchoolType::D;
  if (s == "L") return SchoolType::L;
  if (s == "M") return SchoolType::M;
  if (s == "H") return SchoolType::H;
  if (s == "HSK") return SchoolType::HSK;
  throw FormatError("SchoolType: unknown value '" + std::string(s) + "'");
}

BaseFileRow parse_row(std::string_view line) {
  std::string_view fields[kBaseFileColumnCount];
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (n == kBaseFileColumnCount) {
      throw FormatError("expected " + std::to_string(kBaseFileColumnCount) + " tab-separated fields, got more");
    }
    fields[n++] = line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (n != kBaseFileColumnCount) {
    throw FormatError("expected " + std::to_string(kBaseFileColumnCount) +
                      " tab-separated fields, got " + std::to_string(n));
  }
  BaseFileRow r;
  r.ind_id = parse_uint_field<std::uint64_t>(fields[0], "IndID");
  r.birth_y = parse_uint_field<std::int32_t>(fields[1], "BirthY");
  r.sex = static_cast<std::uint8_t>(parse_uint_field<unsigned>(fields[2], "Sex"));
  r.fam_type = static_cast<std::uint8_t>(parse_uint_field<unsigned>(fields[3], "FamType"));
  r.dw_square = coord_field(fields[4], "DwSquare");
  r.wp_square = coord_field(fields[5], "WPSquare");
  r.school_square = coord_field(fields[6], "SchoolSquare");
  r.fam_id = parse_uint_field<std::uint64_t>(fields[7], "FamID");
  r.workplace_id = opt_field<std::uint64_t>(fields[8], "WorkplaceID");
  r.wp_branchcode = opt_field<std::uint32_t>(fields[9], "WPbranchcode");
  if (auto mun = opt_field<std::uint32_t>(fields[10], "WPmun")) {
    if (*mun > 0xFFFF) throw FormatError("WPmun: " + std::to_string(*mun) + " out of range");
    r.wp_mun = static_cast<std::uint16_t>(*mun);
  }
  r.company_id = opt_field<std::uint64_t>(fields[11], "CompanyID");
  r.school_id = opt_field<std::uint64_t>(fields[12], "SchoolID");
  r.school_type = school_type_field(fields[13]);
  r.father_id = opt_field<std::uint64_t>(fields[14], "FatherID");
  r.mother_id = opt_field<std::uint64_t>(fields[15], "MotherID");
  validate_row(r);
  return r;
}

template <class T>
void put_opt(std::string& out, const std::optional<T>& v) {
  if (v) out += std::to_string(*v);
}

}  // namespace

const char* school_type_name(SchoolType t) noexcept {
  switch (t) {
    case SchoolType::D: return "D";
    case SchoolType::L: return "L";
    case SchoolType::M: return "M";
    case SchoolType::H: return "H";
    case SchoolType::HSK: return "HSK";
  }
  return "";
}

void validate_row(const BaseFileRow& r) {
  if (r.sex != 1 && r.sex != 2) throw FormatError("Sex: " + std::to_string(r.sex) + " not in {1,2}");
  if (r.fam_type < 1 || r.fam_type > 5) {
    throw FormatError("FamType: " + std::to_string(r.fam_type) + " not in 1..5");
  }
  if (r.wp_branchcode && (*r.wp_branchcode < 1 || *r.wp_branchcode > 65535)) {
    throw FormatError("WPbranchcode: " + std::to_string(*r.wp_branchcode) + " not in 1..65535");
  }
  if (r.wp_mun && (*r.wp_mun < 1 || *r.wp_mun > 9999)) {
    throw FormatError("WPmun: " + std::to_string(*r.wp_mun) + " not in 1..9999");
  }
  if (r.workplace_id && *r.workplace_id == 0) throw FormatError("WorkplaceID: 0 is reserved");
  for (const auto& [sq, name] : {std::pair{r.dw_square, "DwSquare"}, std::pair{r.wp_square, "WPSquare"},
                                 std::pair{r.school_square, "SchoolSquare"}}) {
    if (sq && !is_valid_combined(*sq)) {
      throw FormatError(std::string(name) + ": " + std::to_string(*sq) +
                        " does not split into two seven-digit coordinates");
    }
  }
}

BaseFileParse parse_base_file(std::istream& in, const BaseFileOptions& options) {
  BaseFileParse out;
  std::string line;
  std::size_t line_no = 0;
  bool skip_header = options.has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_header) {
      skip_header = false;
      continue;
    }
    if (line.empty()) continue;
    try {
      out.rows.push_back(parse_row(line));
    } catch (const FormatError& e) {
      const std::string msg = "base file line " + std::to_string(line_no) + ": " + e.what();
      if (options.strict) throw FormatError(msg, line_no);
      out.rejected.push_back({line_no, msg});
    }
  }
  return out;
}

void write_base_file(std::ostream& out, const std::vector<BaseFileRow>& rows, bool header) {
  std::string buf;
  if (header) {
    for (std::size_t i = 0; i < kBaseFileColumnCount; ++i) {
      if (i) buf += '\t';
      buf += kBaseFileColumns[i];
    }
    buf += '\n';
  }
  for (const auto& r : rows) {
    buf += std::to_string(r.ind_id);
    buf += '\t';
    buf += std::to_string(r.birth_y);
    buf += '\t';
    buf += std::to_string(r.sex);
    buf += '\t';
    buf += std::to_string(r.fam_type);
    buf += '\t';
    put_opt(buf, r.dw_square);
    buf += '\t';
    put_opt(buf, r.wp_square);
    buf += '\t';
    put_opt(buf, r.school_square);
    buf += '\t';
    buf += std::to_string(r.fam_id);
    buf += '\t';
    put_opt(buf, r.workplace_id);
    buf += '\t';
    put_opt(buf, r.wp_branchcode);
    buf += '\t';
    put_opt(buf, r.wp_mun);
    buf += '\t';
    put_opt(buf, r.company_id);
    buf += '\t';
    put_opt(buf, r.school_id);
    buf += '\t';
    if (r.school_type) buf += school_type_name(*r.school_type);
    buf += '\t';
    put_opt(buf, r.father_id);
    buf += '\t';
    put_opt(buf, r.mother_id);
    buf += '\n';
    if (buf.size() > (1 << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  if (!out) throw Error("base file write failed");
}

}  // namespace microsim
