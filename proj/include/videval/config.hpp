#pragma once

// Job configuration: a flat key=value store loaded from an optional config
// file with command-line flags layered on top (flags win). The canonical
// serialization of the store is hashed into every report so emitted numbers
// are traceable to their inputs.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "videval/util.hpp"

namespace videval {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JobConfig {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values[key] = value; }

  std::string get(const std::string& key, const std::string& fallback = "") const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end() || it->second.empty())
      throw ConfigError("missing required setting '" + key + "'");
    return it->second;
  }

  double get_real(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      std::size_t used = 0;
      double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("setting '" + key + "' is not a number: " + it->second);
    }
  }

  long get_int(const std::string& key, long fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      std::size_t used = 0;
      long v = std::stol(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("setting '" + key + "' is not an integer: " + it->second);
    }
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("setting '" + key + "' is not an unsigned integer: " + it->second);
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw ConfigError("setting '" + key + "' is not a boolean: " + it->second);
  }

  std::vector<std::string> get_list(const std::string& key) const {
    std::vector<std::string> out;
    auto it = values.find(key);
    if (it == values.end()) return out;
    for (auto part : split_view(it->second, ',')) {
      auto t = trim_view(part);
      if (!t.empty()) out.emplace_back(t);
    }
    return out;
  }

  // Sorted key=value lines; the basis of the config hash.
  std::string canonical() const {
    std::ostringstream out;
    for (const auto& [key, value] : values) out << key << '=' << value << '\n';
    return out.str();
  }

  std::string hash() const {
    std::uint64_t h = fnv1a64(canonical());
    static const char* kHex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
      out[i] = kHex[h & 0xf];
      h >>= 4;
    }
    return out;
  }
};

// key=value lines; blank lines and #-comments ignored.
inline void load_config_file(JobConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim_view(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key(trim_view(sv.substr(0, eq)));
    std::string value(trim_view(sv.substr(eq + 1)));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    config.set(key, value);
  }
}

}  // namespace videval
