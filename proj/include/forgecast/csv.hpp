#pragma once

#include "forgecast/types.hpp"

#include <filesystem>
#include <vector>

namespace forgecast {

/// Minimal comma-separated table: one header row, no quoting/escaping.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws if absent.
  Index column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Parses a numeric cell; `line` is the 1-based file line for error messages.
double parse_csv_double(const std::string& cell, std::size_t line);

/// True for cells treated as missing values ("", "NA", "NaN", "nan", "null").
bool csv_cell_missing(const std::string& cell);

}  // namespace forgecast
