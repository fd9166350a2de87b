#pragma once

#include <string>
#include <vector>

namespace regbench::csv {

// RFC-4180 cell grid: first row is the header, '"' quoting, UTF-8 passthrough.
struct Document {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Document parse(const std::string& text);
Document read_file(const std::string& path);

std::string escape_cell(const std::string& cell);
void write_file(const std::string& path, const Document& doc);

}  // namespace regbench::csv
