#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace raceplan::detail {

// Round-trip double formatting, locale independent.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& field, const std::string& file, int line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::runtime_error(file + ":" + std::to_string(line) + ": invalid number '" + field + "'");
  }
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    fields.push_back(field);
  }
  return fields;
}

struct CsvRow {
  int line_no;
  std::vector<std::string> fields;
};

// Reads a CSV file: returns data rows, the header fields, and any `# key=value`
// metadata comments.
struct CsvFile {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
};

inline CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  CsvFile out;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      auto eq = body.find('=');
      if (eq != std::string::npos) {
        std::string key = body.substr(0, eq);
        std::string val = body.substr(eq + 1);
        auto trim = [](std::string& s) {
          while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
          while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        };
        trim(key);
        trim(val);
        out.metadata.emplace_back(key, val);
      }
      continue;
    }
    if (!have_header) {
      out.header = split_csv_line(line);
      have_header = true;
      continue;
    }
    out.rows.push_back({line_no, split_csv_line(line)});
  }
  if (!have_header) throw std::runtime_error(path + ": missing CSV header");
  return out;
}

}  // namespace raceplan::detail
