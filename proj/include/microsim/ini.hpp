#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace microsim {

/// Minimal sectioned key-value text format shared by run configs and
/// disease profiles.
///
///   # comment            (also ';')
///   key = value          (keys before the first section belong to "")
///   [section]            (sections may repeat; order is preserved)
struct IniSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line = 0;

  std::optional<std::string> find(std::string_view key) const;
  bool has(std::string_view key) const { return find(key).has_value(); }

  std::string get_string(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  std::vector<double> get_doubles(std::string_view key, std::vector<double> fallback) const;
  std::vector<std::uint64_t> get_uints(std::string_view key) const;

  double require_double(std::string_view key) const;
};

struct IniDocument {
  std::vector<IniSection> sections;

  /// First section with the given name, if any.
  const IniSection* section(std::string_view name) const;
  std::vector<const IniSection*> all(std::string_view name) const;
};

/// Throws FormatError with the line number on malformed lines.
IniDocument parse_ini(std::istream& in);

}  // namespace microsim
