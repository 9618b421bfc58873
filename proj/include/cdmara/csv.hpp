#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdmara/errors.hpp"

namespace cdmara {

// 12 significant digits; the fixed formatting keeps emitted files
// byte-deterministic.
inline std::string format_sig(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

using CsvRow = std::vector<std::string>;

inline void emit_csv(const std::vector<std::string>& header, const std::vector<CsvRow>& rows,
                     const std::string& path) {
  for (const auto& r : rows)
    if (r.size() != header.size())
      throw std::logic_error("csv row width does not match header");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  write_row(header);
  for (const auto& r : rows) write_row(r);
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace cdmara
