// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/csvio.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace pneusim {

std::string format_double(double x) {
  // %.17g always round-trips; try shorter forms first so files stay readable.
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) raise(ErrorCode::Io, "short write to '" + path.string() + "'");
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string strip(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  CsvTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    if (table.header.empty()) {
      for (auto& f : split_commas(trimmed)) table.header.push_back(strip(f));
      continue;
    }
    std::vector<double> row;
    for (const auto& field : split_commas(trimmed)) {
      const std::string f = strip(field);
      double value = 0.0;
      const char* first = f.c_str();
      char* end = nullptr;
      errno = 0;
      value = std::strtod(first, &end);
      if (end == first || *end != '\0' || errno == ERANGE)
        raise(ErrorCode::LogIntegrity, path.string() + ":" + std::to_string(lineno) +
                                           ": non-numeric field '" + f + "'");
      row.push_back(value);
    }
    if (!table.rows.empty() && row.size() != table.rows.front().size())
      raise(ErrorCode::LogIntegrity,
            path.string() + ":" + std::to_string(lineno) + ": ragged row");
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty())
    raise(ErrorCode::LogIntegrity, path.string() + ": missing header line");
  return table;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorCode::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

}  // namespace pneusim
