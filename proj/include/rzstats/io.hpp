#pragma once

#include <rzstats/error.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <string>

namespace rzstats {

/// Shortest form that still round-trips: 17 significant digits.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Two-column CSV with a header line.
inline void write_two_columns(std::ostream& os, std::string_view header,
                              std::span<const double> a, std::span<const double> b) {
  os << header << '\n';
  for (std::size_t i = 0; i < a.size(); ++i) {
    os << format_double(a[i]) << ',' << format_double(b[i]) << '\n';
  }
}

inline std::ofstream open_output(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::io_error, "cannot open for writing: " + path);
  return out;
}

}  // namespace rzstats
