#pragma once

// Deterministic CSV I/O.  All numeric output goes through format_double,
// which emits the shortest decimal that round-trips the exact binary value;
// identical runs therefore produce byte-identical files on any platform.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "speclab/error.hpp"

namespace speclab {

// Shortest round-trip decimal via std::to_chars.
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws IoError naming the column when absent.
  std::size_t column(const std::string& name) const;
};

// Writes header + rows with '\n' line endings.  Fields in this project never
// contain commas or quotes, so no quoting is applied.  Throws IoError when
// the file cannot be opened.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Reads a CSV written by write_csv.  Throws IoError on open failure or on a
// row whose field count disagrees with the header.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace speclab
