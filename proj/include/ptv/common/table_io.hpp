#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ptv {

// Whitespace- or comma-separated numeric table. `#` starts a comment line.
struct NumericTable {
  std::vector<std::string> comments;      // without the leading '#'
  std::vector<std::vector<double>> rows;  // ragged rows rejectable by caller
  std::vector<int> line_numbers;          // 1-based source line per row
};

NumericTable read_numeric_table(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ptv
