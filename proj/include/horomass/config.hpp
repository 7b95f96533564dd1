#pragma once

// Flat `key = value` experiment configuration: `#` comments, dotted section
// keys (model.name, sweep.L), comma-separated lists, no nesting.  Parsed
// configs normalize to a canonical text form (sorted keys, single spacing)
// that re-parses to the same entries.

#include "horomass/common.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace horomass {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
      return false;
  return true;
}

}  // namespace detail

class Config {
 public:
  static Config parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + " has no '=': " + line);
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (!detail::valid_key(key))
        throw ConfigError("config line " + std::to_string(lineno) + " has a bad key: '" + key +
                          "'");
      if (cfg.entries_.count(key))
        throw ConfigError("config key '" + key + "' appears twice");
      cfg.entries_[key] = value;
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  // Canonical form: keys sorted, `key = value` lines.  parse(normalized())
  // reproduces the same entries.
  std::string normalized() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) {
    if (!detail::valid_key(key)) throw ConfigError("bad config key: '" + key + "'");
    entries_[key] = value;
  }

  const std::string& get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key) const { return to_double(key, get(key)); }

  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  int get_int(const std::string& key) const {
    const double v = get_double(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw ConfigError("config key '" + key + "' must be an integer, got '" + get(key) + "'");
    return i;
  }

  int get_int_or(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
  }

  bool get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' must be boolean, got '" + v + "'");
  }

  std::vector<double> get_list(const std::string& key) const {
    const std::string& v = get(key);
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
      item = detail::trim(item);
      if (item.empty()) throw ConfigError("config key '" + key + "' has an empty list entry");
      out.push_back(to_double(key, item));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
    return out;
  }

  // Unknown keys are hard errors; the offending key is named.
  void require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [k, v] : entries_) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        throw ConfigError("unknown config key '" + k + "'");
    }
  }

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  static double to_double(const std::string& key, const std::string& text) {
    try {
      size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number: '" + text + "'");
    }
  }

  std::map<std::string, std::string> entries_;
};

}  // namespace horomass
