#pragma once

#include <string>
#include <vector>

namespace netinf {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;   // excludes the header
  std::vector<std::size_t> line_numbers;        // 1-based source line of each row
};

// Reads a comma-separated file with a mandatory header line. Lines starting
// with '#' and blank lines are skipped. No quoting support: the file formats
// used here never contain embedded commas.
CsvTable read_csv(const std::string& path);

std::string csv_join(const std::vector<std::string>& fields);

// Writes content to a temp file in the same directory, then renames it into
// place, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace netinf
