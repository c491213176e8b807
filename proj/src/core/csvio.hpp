// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pneusim {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double x);

/// Whole-file read/write with error mapping to ErrorCode::Io.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV: one header line, `#` comment lines skipped,
/// comma-separated doubles elsewhere. Ragged or non-numeric rows are errors.
CsvTable read_csv(const std::filesystem::path& path);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace pneusim
