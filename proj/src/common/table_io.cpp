#include "ptv/common/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ptv/common/error.hpp"

namespace ptv {

NumericTable read_numeric_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path.string());
  NumericTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    if (line[begin] == '#') {
      std::size_t text = line.find_first_not_of(" \t", begin + 1);
      table.comments.push_back(text == std::string::npos
                                   ? std::string{}
                                   : line.substr(text));
      continue;
    }
    for (char& ch : line) {
      if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
    }
    std::vector<double> row;
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      double v = 0.0;
      const char* first = tok.data();
      const char* last = tok.data() + tok.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || ptr != last) {
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": not a number: '" + tok + "'");
      }
      row.push_back(v);
    }
    if (!row.empty()) {
      table.rows.push_back(std::move(row));
      table.line_numbers.push_back(line_no);
    }
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace ptv
