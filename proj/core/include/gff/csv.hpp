#pragma once

#include <string>
#include <vector>

namespace gff {

// Numeric table; rendered with a "# schema=1" comment line, a header row,
// then one line per row with %.17g cells (round-trip exact for doubles).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
};

std::string csv_to_string(const CsvTable& table);

std::string format_double(double v);  // %.17g

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace gff
