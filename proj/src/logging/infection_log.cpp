#include "microsim/infection_log.hpp"

#include <charconv>
#include <string_view>
#include <system_error>

namespace microsim {

const char* const kLogHeader =
    "#seed\tinfection_hour\tplace_type\tplace_east\tplace_north\trisk\t"
    "infector_id\tinfector_home\tinfector_region\tinfector_age\tinfector_sex\tinfector_department\t"
    "infected_id\tinfected_home\tinfected_region\tinfected_age\tinfected_sex\tinfected_department";

const char* const kPartialLogMarker = "#PARTIAL LOG";

namespace {

template <class T>
void put(std::string& s, T v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, r.ptr);
  s.push_back('\t');
}

void put_person(std::string& s, const LoggedPerson& p) {
  put(s, p.id);
  put(s, p.home);
  put(s, p.region);
  put(s, p.age);
  put(s, static_cast<unsigned>(p.sex));
  put(s, p.department);
}

template <class T>
T get(std::string_view field, std::size_t pos) {
  T v{};
  const auto r = std::from_chars(field.data(), field.data() + field.size(), v);
  if (r.ec != std::errc() || r.ptr != field.data() + field.size() || field.empty()) {
    throw FormatError("field " + std::to_string(pos) + ": cannot parse '" + std::string(field) + "'", pos);
  }
  return v;
}

LoggedPerson get_person(const std::vector<std::string_view>& f, std::size_t first) {
  LoggedPerson p;
  p.id = get<std::uint64_t>(f[first], first + 1);
  p.home = get<std::uint64_t>(f[first + 1], first + 2);
  p.region = get<std::uint16_t>(f[first + 2], first + 3);
  p.age = get<std::uint16_t>(f[first + 3], first + 4);
  const auto sex = get<unsigned>(f[first + 4], first + 5);
  if (sex > 2) throw FormatError("field " + std::to_string(first + 5) + ": sex must be 0, 1 or 2", first + 5);
  p.sex = static_cast<std::uint8_t>(sex);
  p.department = get<std::uint16_t>(f[first + 5], first + 6);
  return p;
}

}  // namespace

std::string format_entry(const InfectionLogEntry& e) {
  std::string s;
  s.reserve(160);
  put(s, e.seed);
  put(s, e.infection_hour);
  s += e.place_type;
  s.push_back('\t');
  put(s, e.place_east);
  put(s, e.place_north);
  put(s, e.risk);
  put_person(s, e.infector);
  put_person(s, e.infected);
  s.pop_back();
  return s;
}

InfectionLogEntry parse_entry(const std::string& line) {
  std::vector<std::string_view> f;
  f.reserve(kLogFieldCount);
  std::string_view rest(line);
  while (true) {
    const auto tab = rest.find('\t');
    f.push_back(rest.substr(0, tab));
    if (tab == std::string_view::npos) break;
    rest.remove_prefix(tab + 1);
  }
  if (f.size() != kLogFieldCount) {
    throw FormatError("expected " + std::to_string(kLogFieldCount) + " fields, got " + std::to_string(f.size()),
                      f.size());
  }
  InfectionLogEntry e;
  e.seed = get<std::uint64_t>(f[0], 1);
  e.infection_hour = get<Hour>(f[1], 2);
  if (f[2].empty()) throw FormatError("field 3: empty place type", 3);
  e.place_type = std::string(f[2]);
  e.place_east = get<std::uint32_t>(f[3], 4);
  e.place_north = get<std::uint32_t>(f[4], 5);
  e.risk = get<double>(f[5], 6);
  if (!(e.risk >= 0.0 && e.risk < 1.0)) throw FormatError("field 6: risk outside [0,1)", 6);
  e.infector = get_person(f, 6);
  e.infected = get_person(f, 12);
  return e;
}

InfectionLogWriter::InfectionLogWriter(std::ostream& out, std::size_t batch, bool header)
    : out_(out), batch_(batch == 0 ? 1 : batch) {
  if (header) {
    out_ << kLogHeader << '\n';
    if (!out_) fail();
  }
}

InfectionLogWriter::~InfectionLogWriter() {
  if (failed_) return;
  try {
    flush();
  } catch (...) {
  }
}

void InfectionLogWriter::append(const InfectionLogEntry& e) {
  if (failed_) throw Error("infection log already failed");
  buffer_ += format_entry(e);
  buffer_ += '\n';
  ++count_;
  if (++pending_ >= batch_) flush();
}

void InfectionLogWriter::flush() {
  if (failed_) return;
  out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  out_.flush();
  if (!out_) fail();
  buffer_.clear();
  pending_ = 0;
}

void InfectionLogWriter::fail() {
  failed_ = true;
  out_.clear();
  out_ << kPartialLogMarker << ": write failed after " << count_ << " entries\n";
  out_.flush();
  throw Error("writing the infection log failed after " + std::to_string(count_) + " entries");
}

std::vector<InfectionLogEntry> parse_log(std::istream& in) {
  std::vector<InfectionLogEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(kPartialLogMarker, 0) == 0) {
      throw Error("line " + std::to_string(line_no) + ": log is marked partial");
    }
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(parse_entry(line));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return out;
}

LogSummary summarize(const std::vector<InfectionLogEntry>& entries, std::uint64_t population) {
  LogSummary s;
  s.infections = entries.size();
  s.attack_rate = population == 0 ? 0.0 : static_cast<double>(entries.size()) / static_cast<double>(population);
  for (const auto& e : entries) {
    const auto day = static_cast<std::size_t>(e.infection_hour / 24);
    if (s.daily.size() <= day) s.daily.resize(day + 1, 0);
    ++s.daily[day];
    ++s.place_counts[e.place_type];
  }
  for (const auto& [type, n] : s.place_counts) {
    s.place_shares[type] = static_cast<double>(n) / static_cast<double>(entries.size());
  }
  std::uint64_t best = 0;
  for (std::size_t d = 0; d < s.daily.size(); ++d) {
    if (s.daily[d] > best) {
      best = s.daily[d];
      s.peak_day = static_cast<int>(d);
    }
  }
  return s;
}

}  // namespace microsim
