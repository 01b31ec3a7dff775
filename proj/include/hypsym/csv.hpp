#pragma once

// Shortest-exact CSV number formatting shared by every exporter, so that
// identical doubles always produce identical bytes.

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>

namespace hypsym {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_number(v);
    first = false;
  }
  out << '\n';
}

}  // namespace hypsym
