#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace regimecast {

// Minimal CSV support: comma-separated fields, no embedded commas or quotes.
// Handles trailing \r and skips blank lines.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path);

std::string read_file(const std::string& path);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void row(const std::vector<std::string>& fields);
  bool ok() const { return static_cast<bool>(out_); }

 private:
  std::ofstream out_;
};

}  // namespace regimecast
