#include "regbench/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace regbench::csv {

namespace {

// One pass over the text, tracking quote state. Accepts \n and \r\n row
// terminators; a trailing newline does not produce an empty row.
std::vector<std::vector<std::string>> parse_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool cell_started = false;
  size_t i = 0;
  const size_t n = text.size();
  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_row = [&] {
    end_cell();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < n) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          cell += '"';
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        cell += c;
        ++i;
      }
    } else if (c == '"' && !cell_started && cell.empty()) {
      in_quotes = true;
      cell_started = true;
      ++i;
    } else if (c == ',') {
      end_cell();
      ++i;
    } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
      end_row();
      i += 2;
    } else if (c == '\n') {
      end_row();
      ++i;
    } else {
      cell += c;
      cell_started = true;
      ++i;
    }
  }
  if (in_quotes) throw std::runtime_error("csv: unterminated quoted cell");
  if (cell_started || !cell.empty() || !row.empty()) end_row();
  return rows;
}

}  // namespace

Document parse(const std::string& text) {
  auto rows = parse_rows(text);
  if (rows.empty()) throw std::runtime_error("csv: missing header row");
  Document doc;
  doc.header = std::move(rows.front());
  const size_t width = doc.header.size();
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw std::runtime_error("csv: row " + std::to_string(r) + " has " +
                               std::to_string(rows[r].size()) + " cells, header has " +
                               std::to_string(width));
    }
    doc.rows.push_back(std::move(rows[r]));
  }
  return doc;
}

Document read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string escape_cell(const std::string& cell) {
  bool needs_quotes = cell.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

void write_file(const std::string& path, const Document& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot open for write " + path);
  auto write_row = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << escape_cell(row[i]);
    }
    out << '\n';
  };
  write_row(doc.header);
  for (const auto& row : doc.rows) write_row(row);
}

}  // namespace regbench::csv
