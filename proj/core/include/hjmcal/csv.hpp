#pragma once

#include <string>
#include <vector>

namespace hjmcal {

using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;

  // Column index by header name; throws DataError if absent.
  std::size_t col(const std::string& name) const;
};

// Minimal CSV: comma separator, optional double-quote quoting, first row is the header.
// Blank lines and lines starting with '#' are skipped.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

void write_csv(const std::string& path, const CsvTable& table);
std::string format_csv(const CsvTable& table);

// Locale-independent numeric formatting used by all emitted files (determinism contract).
std::string format_double(double v, int precision = 17);

}  // namespace hjmcal
