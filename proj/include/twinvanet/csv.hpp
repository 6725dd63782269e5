#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace twinvanet::csv {

// Splits one CSV line. Fields may be double-quoted; embedded quotes are
// escaped by doubling ("").
inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

// Quotes a field when it contains a delimiter, quote, or newline.
inline std::string quote(std::string_view s) {
  bool needs = s.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Shortest decimal form that parses back to the same double bit pattern.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return std::string(buf);
}

inline double parse_double(std::string_view s, bool* ok = nullptr) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  bool good = res.ec == std::errc() && res.ptr == s.data() + s.size();
  if (ok) *ok = good;
  return good ? v : 0.0;
}

inline long long parse_int(std::string_view s, bool* ok = nullptr) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  bool good = res.ec == std::errc() && res.ptr == s.data() + s.size();
  if (ok) *ok = good;
  return good ? v : 0;
}

}  // namespace twinvanet::csv
