#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "microsim/error.hpp"

namespace microsim {

/// Person attributes recorded for both sides of an infection. All fields
/// are zero for the infector of an outbreak seed.
struct LoggedPerson {
  std::uint64_t id = 0;
  std::uint64_t home = 0;
  std::uint16_t region = 0;
  std::uint16_t age = 0;
  std::uint8_t sex = 0;
  std::uint16_t department = 0;

  friend bool operator==(const LoggedPerson&, const LoggedPerson&) = default;
};

struct InfectionLogEntry {
  std::uint64_t seed = 0;
  Hour infection_hour = 0;
  std::string place_type;
  std::uint32_t place_east = 0;
  std::uint32_t place_north = 0;
  double risk = 0.0;
  LoggedPerson infector;
  LoggedPerson infected;

  friend bool operator==(const InfectionLogEntry&, const InfectionLogEntry&) = default;
};

inline constexpr std::size_t kLogFieldCount = 18;
extern const char* const kLogHeader;
/// First characters of the line written when a run aborts mid-log.
extern const char* const kPartialLogMarker;

/// One line without the terminating newline.
std::string format_entry(const InfectionLogEntry& e);
/// Throws FormatError (position = field number) on malformed input.
InfectionLogEntry parse_entry(const std::string& line);

/// Buffers lines and writes them every `batch` entries. When the stream
/// fails the writer appends a partial-log marker and throws Error.
class InfectionLogWriter {
 public:
  explicit InfectionLogWriter(std::ostream& out, std::size_t batch = 1024, bool header = true);
  ~InfectionLogWriter();

  void append(const InfectionLogEntry& e);
  void flush();
  std::uint64_t written() const noexcept { return count_; }

 private:
  void fail();

  std::ostream& out_;
  std::size_t batch_;
  std::size_t pending_ = 0;
  std::string buffer_;
  std::uint64_t count_ = 0;
  bool failed_ = false;
};

/// Skips `#` comment lines; throws FormatError with the line number on a
/// malformed line, and Error if the log carries the partial-log marker.
std::vector<InfectionLogEntry> parse_log(std::istream& in);

struct LogSummary {
  std::uint64_t infections = 0;
  double attack_rate = 0.0;
  /// Entry d counts infections with infection_hour / 24 == d.
  std::vector<std::uint64_t> daily;
  std::map<std::string, std::uint64_t> place_counts;
  std::map<std::string, double> place_shares;
  int peak_day = -1;
};

LogSummary summarize(const std::vector<InfectionLogEntry>& entries, std::uint64_t population);

}  // namespace microsim
