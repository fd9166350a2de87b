#include "regbench/datatable.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

#include "regbench/csv.hpp"

namespace regbench {

DataTable::DataTable(std::vector<std::string> names, std::vector<std::vector<double>> columns)
    : names_(std::move(names)), columns_(std::move(columns)) {
  if (names_.size() != columns_.size())
    throw std::runtime_error("table: name/column count mismatch");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw std::runtime_error("table: duplicate column name '" + n + "'");
  }
  n_rows_ = columns_.empty() ? 0 : columns_[0].size();
  for (size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].size() != n_rows_)
      throw std::runtime_error("table: column '" + names_[c] + "' has ragged length");
    for (double v : columns_[c]) {
      if (!std::isfinite(v))
        throw std::runtime_error("table: non-finite value in column '" + names_[c] + "'");
    }
  }
}

bool DataTable::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

size_t DataTable::column_index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::runtime_error("table: unknown column '" + name + "'");
  return static_cast<size_t>(it - names_.begin());
}

const std::vector<double>& DataTable::column(const std::string& name) const {
  return columns_[column_index(name)];
}

std::vector<double> DataTable::row(size_t r) const {
  if (r >= n_rows_) throw std::runtime_error("table: row index out of range");
  std::vector<double> out(n_cols());
  for (size_t c = 0; c < n_cols(); ++c) out[c] = columns_[c][r];
  return out;
}

DataTable DataTable::select(const std::vector<std::string>& names) const {
  std::vector<std::vector<double>> cols;
  cols.reserve(names.size());
  for (const auto& n : names) cols.push_back(column(n));
  return DataTable(names, std::move(cols));
}

DataTable DataTable::drop(const std::vector<std::string>& names) const {
  std::vector<std::string> keep;
  for (const auto& n : names) column_index(n);  // validate
  for (const auto& n : names_) {
    if (std::find(names.begin(), names.end(), n) == names.end()) keep.push_back(n);
  }
  return select(keep);
}

DataTable DataTable::take_rows(const std::vector<size_t>& indices) const {
  std::vector<std::vector<double>> cols(n_cols());
  for (size_t idx : indices) {
    if (idx >= n_rows_) throw std::runtime_error("table: row index out of range");
  }
  for (size_t c = 0; c < n_cols(); ++c) {
    cols[c].reserve(indices.size());
    for (size_t idx : indices) cols[c].push_back(columns_[c][idx]);
  }
  return DataTable(names_, std::move(cols));
}

std::pair<DataTable, DataTable> DataTable::split_rows(const std::vector<size_t>& indices) const {
  std::vector<bool> picked(n_rows_, false);
  for (size_t idx : indices) {
    if (idx >= n_rows_) throw std::runtime_error("table: split index out of range");
    if (picked[idx]) throw std::runtime_error("table: duplicate split index");
    picked[idx] = true;
  }
  std::vector<size_t> rest;
  rest.reserve(n_rows_ - indices.size());
  for (size_t r = 0; r < n_rows_; ++r)
    if (!picked[r]) rest.push_back(r);
  return {take_rows(indices), take_rows(rest)};
}

DataTable DataTable::concat_rows(const DataTable& a, const DataTable& b) {
  if (a.names_ != b.names_) throw std::runtime_error("table: concat with mismatched columns");
  std::vector<std::vector<double>> cols(a.n_cols());
  for (size_t c = 0; c < a.n_cols(); ++c) {
    cols[c] = a.columns_[c];
    cols[c].insert(cols[c].end(), b.columns_[c].begin(), b.columns_[c].end());
  }
  return DataTable(a.names_, std::move(cols));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

DataTable load_csv(const std::string& path, MissingPolicy policy, LoadReport* report) {
  auto doc = csv::read_file(path);
  {
    std::set<std::string> seen;
    for (const auto& h : doc.header) {
      if (!seen.insert(h).second)
        throw std::runtime_error("load_csv: duplicate header '" + h + "' in " + path);
    }
  }
  const size_t width = doc.header.size();
  std::vector<std::vector<double>> cols(width);
  LoadReport rep;
  for (size_t r = 0; r < doc.rows.size(); ++r) {
    rep.rows_read++;
    std::vector<double> vals(width);
    bool missing = false;
    for (size_t c = 0; c < width; ++c) {
      const std::string& cell = doc.rows[r][c];
      if (cell.empty()) {
        missing = true;
        if (policy == MissingPolicy::error)
          throw std::runtime_error("load_csv: empty cell at row " + std::to_string(r + 2) +
                                   ", column '" + doc.header[c] + "' in " + path);
        break;
      }
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      auto res = std::from_chars(first, last, vals[c]);
      if (res.ec != std::errc() || res.ptr != last || !std::isfinite(vals[c]))
        throw std::runtime_error("load_csv: non-numeric cell '" + cell + "' at row " +
                                 std::to_string(r + 2) + ", column '" + doc.header[c] + "' in " +
                                 path);
    }
    if (missing) {
      rep.rows_dropped++;
      continue;
    }
    for (size_t c = 0; c < width; ++c) cols[c].push_back(vals[c]);
  }
  if (report) *report = rep;
  return DataTable(doc.header, std::move(cols));
}

void write_csv(const DataTable& table, const std::string& path) {
  csv::Document doc;
  doc.header = table.names();
  doc.rows.resize(table.n_rows());
  for (size_t r = 0; r < table.n_rows(); ++r) {
    doc.rows[r].resize(table.n_cols());
    for (size_t c = 0; c < table.n_cols(); ++c) doc.rows[r][c] = format_double(table.column(c)[r]);
  }
  csv::write_file(path, doc);
}

}  // namespace regbench
