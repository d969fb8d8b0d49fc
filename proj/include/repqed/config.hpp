#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace repqed::cli {

// Config-format or command-line problem: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem problem: exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

struct SweepConfig {
  std::string command;
  std::map<std::string, ConfigEntry> entries;
  std::string source_text;  // raw input, hashed into outputs
};

// Line-oriented `key = value` text with '#' comments and [command] section
// headers; a `command = ...` key is equivalent.  Duplicate keys keep the
// last value and warn on `diag`.
SweepConfig parse_config(std::string_view text, std::ostream& diag);

// Reads and parses a config file; IoError if unreadable.
SweepConfig load_config(const std::string& path, std::ostream& diag);

// Typed accessors over parsed entries with consumption tracking, so that
// finish() can reject unknown keys with their line numbers.
class ConfigView {
 public:
  explicit ConfigView(const SweepConfig& config) : cfg_(&config) {}

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, std::string def) const;
  double get_double(const std::string& key, double def) const;
  long long get_int(const std::string& key, long long def) const;
  bool get_bool(const std::string& key, bool def) const;
  // Time values are nanoseconds, with an optional "ns" suffix; returned in
  // seconds.
  double get_time_seconds(const std::string& key, double def_seconds) const;
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> def) const;
  std::vector<double> get_time_seconds_list(const std::string& key,
                                            std::vector<double> def) const;
  std::vector<std::string> get_string_list(
      const std::string& key, std::vector<std::string> def) const;
  void finish() const;  // UsageError on unconsumed keys

 private:
  const ConfigEntry* lookup(const std::string& key) const;
  const SweepConfig* cfg_;
  mutable std::set<std::string> used_;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace repqed::cli
