#include "microsim/ini.hpp"

#include <charconv>
#include <sstream>

#include "microsim/error.hpp"

namespace microsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view s) {
  const auto p = s.find_first_of("#;");
  return p == std::string_view::npos ? s : s.substr(0, p);
}

[[noreturn]] void bad_value(const IniSection& sec, std::string_view key, const std::string& v,
                            const char* expected) {
  throw ConfigError("[" + sec.name + "] " + std::string(key) + " = '" + v + "': expected " +
                    expected);
}

template <class T>
T parse_number(const IniSection& sec, std::string_view key, const std::string& v,
               const char* expected) {
  T out{};
  const auto t = trim(v);
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || t.empty()) bad_value(sec, key, v, expected);
  return out;
}

}  // namespace

std::optional<std::string> IniSection::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string IniSection::get_string(std::string_view key, std::string fallback) const {
  auto v = find(key);
  return v ? *v : std::move(fallback);
}

double IniSection::get_double(std::string_view key, double fallback) const {
  auto v = find(key);
  return v ? parse_number<double>(*this, key, *v, "a number") : fallback;
}

double IniSection::require_double(std::string_view key) const {
  auto v = find(key);
  if (!v) throw ConfigError("[" + name + "] missing required key '" + std::string(key) + "'");
  return parse_number<double>(*this, key, *v, "a number");
}

std::int64_t IniSection::get_int(std::string_view key, std::int64_t fallback) const {
  auto v = find(key);
  return v ? parse_number<std::int64_t>(*this, key, *v, "an integer") : fallback;
}

std::uint64_t IniSection::get_uint(std::string_view key, std::uint64_t fallback) const {
  auto v = find(key);
  return v ? parse_number<std::uint64_t>(*this, key, *v, "a non-negative integer") : fallback;
}

bool IniSection::get_bool(std::string_view key, bool fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  bad_value(*this, key, *v, "a boolean");
}

std::vector<double> IniSection::get_doubles(std::string_view key,
                                            std::vector<double> fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number<double>(*this, key, item, "a comma-separated list of numbers"));
  }
  return out;
}

std::vector<std::uint64_t> IniSection::get_uints(std::string_view key) const {
  auto v = find(key);
  std::vector<std::uint64_t> out;
  if (!v) return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(
        parse_number<std::uint64_t>(*this, key, item, "a comma-separated list of integers"));
  }
  return out;
}

const IniSection* IniDocument::section(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<const IniSection*> IniDocument::all(std::string_view name) const {
  std::vector<const IniSection*> out;
  for (const auto& s : sections) {
    if (s.name == name) out.push_back(&s);
  }
  return out;
}

IniDocument parse_ini(std::istream& in) {
  IniDocument doc;
  doc.sections.push_back(IniSection{"", {}, 0});
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("unterminated section header", line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw FormatError("empty section name", line_no);
      doc.sections.push_back(IniSection{std::string(name), {}, line_no});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError("expected 'key = value'", line_no);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw FormatError("empty key", line_no);
    doc.sections.back().entries.emplace_back(std::string(key),
                                             std::string(trim(line.substr(eq + 1))));
  }
  return doc;
}

}  // namespace microsim
