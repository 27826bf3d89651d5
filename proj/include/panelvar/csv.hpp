#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "panelvar/errors.hpp"

namespace panelvar {

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double csv_num(const std::string& field) {
  double v = 0.0;
  const auto* begin = field.data();
  const auto* end = begin + field.size();
  while (begin != end && *begin == ' ') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{}) throw Error("bad numeric field '" + field + "'");
  return v;
}

/// Shortest round-trippable decimal form, so reruns are byte-identical.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[32];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

struct CsvReader {
  explicit CsvReader(const std::string& path) : in(path) {
    if (!in) throw Error("cannot open '" + path + "'");
  }
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      fields = csv_split(line);
      return true;
    }
    return false;
  }
  std::ifstream in;
};

struct CsvWriter {
  explicit CsvWriter(const std::string& path) : out(path) {
    if (!out) throw Error("cannot open '" + path + "' for writing");
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  }
  std::ofstream out;
};

}  // namespace panelvar
