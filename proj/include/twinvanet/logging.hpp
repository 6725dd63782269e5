#pragma once

#include <cstdio>
#include <ctime>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace twinvanet::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3 };

inline Level& threshold() {
  static Level t = Level::Info;
  return t;
}

inline const char* level_name(Level l) {
  switch (l) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    default: return "error";
  }
}

// Line-oriented diagnostics on stderr: "<ts> <level> <msg> k=v k=v".
// Values containing spaces are quoted so lines stay machine-parsable.
inline void line(Level l, std::string_view msg,
                 std::initializer_list<std::pair<std::string_view, std::string>>
                     kv = {}) {
  if (l < threshold()) return;
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char ts[24];
  std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::string out = std::string(ts) + " " + level_name(l) + " ";
  out.append(msg);
  for (const auto& [k, v] : kv) {
    out += ' ';
    out.append(k);
    out += '=';
    bool needs_quote = v.find_first_of(" \t\"") != std::string::npos;
    if (needs_quote) {
      out += '"';
      for (char c : v) {
        if (c == '"') out += '\\';
        out += c;
      }
      out += '"';
    } else {
      out += v;
    }
  }
  out += '\n';
  std::fputs(out.c_str(), stderr);
}

inline void info(std::string_view msg,
                 std::initializer_list<std::pair<std::string_view, std::string>>
                     kv = {}) {
  line(Level::Info, msg, kv);
}

inline void warn(std::string_view msg,
                 std::initializer_list<std::pair<std::string_view, std::string>>
                     kv = {}) {
  line(Level::Warn, msg, kv);
}

inline void error(std::string_view msg,
                  std::initializer_list<std::pair<std::string_view, std::string>>
                      kv = {}) {
  line(Level::Error, msg, kv);
}

}  // namespace twinvanet::log
