#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace uep {

// Line-oriented "key = value" configuration with dotted section keys
// (e.g. "ofdm.n_audio_subcarriers = 52"). Lines whose first non-blank
// character is '#' are comments; inline comments are not supported (a
// silently truncated physics parameter is worse than a strict parser).
//
// Every typed getter records the key as consumed; after reading all the
// parameters it understands, a command calls require_all_consumed() so a
// misspelled key is a hard error carrying its line number, never a silent
// default. Duplicate keys are rejected at parse time.
class KeyValueConfig {
 public:
  // Throws IoError when the file cannot be read, ConfigError on bad syntax.
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_text(const std::string& text,
                                   const std::string& origin = "<config>");

  bool has(const std::string& key) const;

  // Required getters throw ConfigError on a missing key or an unparseable
  // value; the _or variants fall back to the given default when absent.
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key,
                            const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  // Numeric grid: either "start:step:stop" (step > 0, start <= stop,
  // inclusive of stop up to rounding) or an explicit comma list. Never
  // empty.
  std::vector<double> get_grid(const std::string& key) const;

  // Comma-separated names, trimmed, none empty.
  std::vector<std::string> get_string_list(const std::string& key) const;

  // Throws ConfigError listing every key no getter has touched.
  void require_all_consumed() const;

  // Stable digest of the parsed key/value pairs (order-independent), for
  // stamping outputs so a result can be traced back to its exact config.
  std::uint64_t content_hash() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };

  const Entry& fetch(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const Entry& entry,
                         const std::string& what) const;

  std::map<std::string, Entry> entries_;
  std::string origin_ = "<config>";
};

}  // namespace uep
