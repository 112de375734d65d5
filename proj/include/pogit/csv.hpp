#pragma once

#include <string>
#include <vector>

namespace pogit {

// Comma-separated, header row, '.' decimal, no quoting. All tabular output
// of the project goes through format_double so reruns are byte-identical.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;  // throws DataError if missing
};

std::string format_double(double v);  // shortest round-trip ("%.17g")

void write_csv(const std::string& path, const CsvTable& table);

// Throws DataError with the line number on ragged rows.
CsvTable read_csv(const std::string& path);

// Strict numeric field parsers; `line` is the 1-based file line for error
// messages.
double parse_double(const std::string& field, const std::string& path, int line);
long long parse_int(const std::string& field, const std::string& path, int line);

}  // namespace pogit
