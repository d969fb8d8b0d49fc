#include "repqed/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace repqed::cli {

namespace {

const std::set<std::string>& known_commands() {
  static const std::set<std::string> commands{
      "analytic", "nqubit", "multicycle", "protocol", "storage", "verify"};
  return commands;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw UsageError("config line " + std::to_string(line) + ": " + what);
}

void set_command(SweepConfig& out, const std::string& name, int line) {
  if (!known_commands().count(name))
    fail(line, "unknown command '" + name + "'");
  out.command = name;
}

double parse_number(const std::string& raw, const std::string& key, int line,
                    bool* had_ns_suffix = nullptr) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin)
    fail(line, "key '" + key + "': malformed number '" + raw + "'");
  std::string_view rest = trim(std::string_view(end));
  if (rest == "ns") {
    if (!had_ns_suffix)
      fail(line, "key '" + key + "': unit suffix not allowed here");
    *had_ns_suffix = true;
    rest = {};
  } else if (had_ns_suffix) {
    *had_ns_suffix = false;
  }
  if (!rest.empty())
    fail(line,
         "key '" + key + "': trailing characters after number '" + raw + "'");
  return v;
}

std::vector<std::string> split_list(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    const std::size_t comma = raw.find(',', start);
    const std::string_view piece =
        raw.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                          : comma - start);
    out.emplace_back(trim(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

SweepConfig parse_config(std::string_view text, std::ostream& diag) {
  SweepConfig out;
  out.source_text = std::string(text);
  std::istringstream stream{out.source_text};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    std::string_view line = raw_line;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(line_no, "unterminated section header");
      const std::string name{trim(line.substr(1, line.size() - 2))};
      if (!out.command.empty())
        diag << "config line " << line_no << ": command respecified, using '"
             << name << "'\n";
      set_command(out, name, line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(line_no, "expected 'key = value'");
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty()) fail(line_no, "empty key");
    if (key == "command") {
      if (!out.command.empty())
        diag << "config line " << line_no << ": command respecified, using '"
             << value << "'\n";
      set_command(out, value, line_no);
      continue;
    }
    const auto it = out.entries.find(key);
    if (it != out.entries.end())
      diag << "config line " << line_no << ": duplicate key '" << key
           << "' overrides line " << it->second.line << "\n";
    out.entries[key] = ConfigEntry{value, line_no};
  }
  if (out.command.empty())
    throw UsageError("config: no command given (use [name] or command = name)");
  return out;
}

SweepConfig load_config(const std::string& path, std::ostream& diag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), diag);
}

const ConfigEntry* ConfigView::lookup(const std::string& key) const {
  const auto it = cfg_->entries.find(key);
  if (it == cfg_->entries.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

bool ConfigView::has(const std::string& key) const {
  return lookup(key) != nullptr;
}

std::string ConfigView::get_string(const std::string& key,
                                   std::string def) const {
  const ConfigEntry* e = lookup(key);
  return e ? e->value : def;
}

double ConfigView::get_double(const std::string& key, double def) const {
  const ConfigEntry* e = lookup(key);
  return e ? parse_number(e->value, key, e->line) : def;
}

long long ConfigView::get_int(const std::string& key, long long def) const {
  const ConfigEntry* e = lookup(key);
  if (!e) return def;
  const double v = parse_number(e->value, key, e->line);
  const long long r = std::llround(v);
  if (static_cast<double>(r) != v)
    fail(e->line, "key '" + key + "': expected an integer");
  return r;
}

bool ConfigView::get_bool(const std::string& key, bool def) const {
  const ConfigEntry* e = lookup(key);
  if (!e) return def;
  std::string v = e->value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(e->line, "key '" + key + "': expected a boolean");
}

double ConfigView::get_time_seconds(const std::string& key,
                                    double def_seconds) const {
  const ConfigEntry* e = lookup(key);
  if (!e) return def_seconds;
  bool ns = false;
  const double v = parse_number(e->value, key, e->line, &ns);
  return v * 1e-9;  // values are nanoseconds with or without the suffix
}

std::vector<double> ConfigView::get_double_list(
    const std::string& key, std::vector<double> def) const {
  const ConfigEntry* e = lookup(key);
  if (!e) return def;
  std::vector<double> out;
  for (const std::string& piece : split_list(e->value))
    out.push_back(parse_number(piece, key, e->line));
  return out;
}

std::vector<double> ConfigView::get_time_seconds_list(
    const std::string& key, std::vector<double> def) const {
  const ConfigEntry* e = lookup(key);
  if (!e) return def;
  std::vector<double> out;
  for (const std::string& piece : split_list(e->value)) {
    bool ns = false;
    out.push_back(parse_number(piece, key, e->line, &ns) * 1e-9);
  }
  return out;
}

std::vector<std::string> ConfigView::get_string_list(
    const std::string& key, std::vector<std::string> def) const {
  const ConfigEntry* e = lookup(key);
  return e ? split_list(e->value) : def;
}

void ConfigView::finish() const {
  std::string unknown;
  for (const auto& [key, entry] : cfg_->entries) {
    if (used_.count(key)) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += "'" + key + "' (line " + std::to_string(entry.line) + ")";
  }
  if (!unknown.empty())
    throw UsageError("config: unknown key(s) for command '" + cfg_->command +
                     "': " + unknown);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace repqed::cli
