#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "twinvanet/csv.hpp"

namespace twinvanet {

// Structured key-value configuration file: "[section]" headers, "key = value"
// lines, '#' comments. Values may be bare scalars or double-quoted strings,
// which covers flat TOML files. Flags on the command line override anything
// read from here.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in) {
    ConfigFile cf;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view v = trim(line);
      if (v.empty() || v.front() == '#' || v.front() == ';') continue;
      if (v.front() == '[') {
        if (v.back() != ']')
          throw std::runtime_error("config line " + std::to_string(lineno) +
                                   ": malformed section header");
        section = std::string(trim(v.substr(1, v.size() - 2)));
        continue;
      }
      auto eq = v.find('=');
      if (eq == std::string_view::npos)
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": expected key = value");
      std::string key = std::string(trim(v.substr(0, eq)));
      std::string val = std::string(trim(v.substr(eq + 1)));
      if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
        val = unescape(val.substr(1, val.size() - 2));
      cf.values_[section][key] = val;
    }
    return cf;
  }

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse(in);
  }

  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const {
    auto s = values_.find(section);
    if (s == values_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         std::string def) const {
    auto v = get(section, key);
    return v ? *v : def;
  }

  double get_double(const std::string& section, const std::string& key,
                    double def) const {
    auto v = get(section, key);
    if (!v) return def;
    bool ok = false;
    double d = csv::parse_double(*v, &ok);
    if (!ok) throw std::runtime_error(bad(section, key, *v, "number"));
    return d;
  }

  long long get_int(const std::string& section, const std::string& key,
                    long long def) const {
    auto v = get(section, key);
    if (!v) return def;
    bool ok = false;
    long long i = csv::parse_int(*v, &ok);
    if (!ok) throw std::runtime_error(bad(section, key, *v, "integer"));
    return i;
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool def) const {
    auto v = get(section, key);
    if (!v) return def;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw std::runtime_error(bad(section, key, *v, "boolean"));
  }

  const std::map<std::string, std::map<std::string, std::string>>& sections()
      const {
    return values_;
  }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.remove_suffix(1);
    return s;
  }

  static std::string unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\\' && i + 1 < s.size()) ++i;
      out += s[i];
    }
    return out;
  }

  static std::string bad(const std::string& sec, const std::string& key,
                         const std::string& val, const char* want) {
    std::ostringstream os;
    os << "config [" << sec << "] " << key << ": expected " << want << ", got '"
       << val << "'";
    return os.str();
  }

  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace twinvanet
