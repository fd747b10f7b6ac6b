#include "uep/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uep/errors.hpp"

namespace uep {
namespace {

std::string trim(const std::string& s) {
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

double parse_double(const std::string& text, const std::string& context) {
  std::string v = trim(text);
  if (v.size() > 1 && v.front() == '+') v.erase(v.begin());
  double out = 0.0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ConfigError(context + ": not a number: '" + v + "'");
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file: " + path);
  return parse_text(buf.str(), path);
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text,
                                          const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": bad key '" + key + "'");
    if (value.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": empty value for '" + key + "'");
    const auto [it, inserted] = cfg.entries_.emplace(key, Entry{value, lineno});
    if (!inserted)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "' (first on line " +
                        std::to_string(it->second.line) + ")");
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

const KeyValueConfig::Entry& KeyValueConfig::fetch(
    const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError(origin_ + ": missing required key '" + key + "'");
  it->second.consumed = true;
  return it->second;
}

void KeyValueConfig::fail(const std::string& key, const Entry& entry,
                          const std::string& what) const {
  throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": key '" +
                    key + "' " + what + " (value: '" + entry.value + "')");
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  return fetch(key).value;
}

std::string KeyValueConfig::get_string_or(const std::string& key,
                                          const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const Entry& entry = fetch(key);
  try {
    return parse_double(entry.value, key);
  } catch (const ConfigError&) {
    fail(key, entry, "is not a number");
  }
}

double KeyValueConfig::get_double_or(const std::string& key,
                                     double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const Entry& entry = fetch(key);
  std::int64_t out = 0;
  const auto* first = entry.value.data();
  const auto* last = entry.value.data() + entry.value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last)
    fail(key, entry, "is not an integer");
  return out;
}

std::int64_t KeyValueConfig::get_int_or(const std::string& key,
                                        std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const Entry& entry = fetch(key);
  std::string v = entry.value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(key, entry, "is not a boolean");
}

bool KeyValueConfig::get_bool_or(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<double> KeyValueConfig::get_grid(const std::string& key) const {
  const Entry& entry = fetch(key);
  const std::string& v = entry.value;
  std::vector<double> out;
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) fail(key, entry, "must be 'start:step:stop'");
    const double start = parse_double(parts[0], key);
    const double step = parse_double(parts[1], key);
    const double stop = parse_double(parts[2], key);
    if (step <= 0.0) fail(key, entry, "needs a positive step");
    if (stop < start) fail(key, entry, "needs stop >= start");
    // Inclusive of the endpoint up to a half-ulp-scale slack so that
    // "0:2:30" lands exactly 16 points.
    const int count =
        static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(start + i * step);
  } else {
    for (const auto& item : split(v, ','))
      out.push_back(parse_double(item, key));
  }
  if (out.empty()) fail(key, entry, "must not be empty");
  return out;
}

std::vector<std::string> KeyValueConfig::get_string_list(
    const std::string& key) const {
  const Entry& entry = fetch(key);
  std::vector<std::string> out;
  for (const auto& item : split(entry.value, ',')) {
    const std::string name = trim(item);
    if (name.empty()) fail(key, entry, "has an empty list item");
    out.push_back(name);
  }
  if (out.empty()) fail(key, entry, "must not be empty");
  return out;
}

void KeyValueConfig::require_all_consumed() const {
  std::string unknown;
  for (const auto& [key, entry] : entries_) {
    if (entry.consumed) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += "'" + key + "' (line " + std::to_string(entry.line) + ")";
  }
  if (!unknown.empty())
    throw ConfigError(origin_ + ": unknown key(s): " + unknown);
}

std::uint64_t KeyValueConfig::content_hash() const {
  // FNV-1a over "key=value\n" in map (sorted) order.
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [key, entry] : entries_) {
    mix(key);
    mix("=");
    mix(entry.value);
    mix("\n");
  }
  return h;
}

}  // namespace uep
