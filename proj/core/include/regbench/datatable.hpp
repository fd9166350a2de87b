#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace regbench {

// Equal-length named numeric columns. All values are finite doubles;
// integer-valued data keeps exact float representation at these magnitudes.
class DataTable {
 public:
  DataTable() = default;
  DataTable(std::vector<std::string> names, std::vector<std::vector<double>> columns);

  size_t n_rows() const { return n_rows_; }
  size_t n_cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  bool has_column(const std::string& name) const;
  size_t column_index(const std::string& name) const;
  const std::vector<double>& column(size_t i) const { return columns_[i]; }
  const std::vector<double>& column(const std::string& name) const;

  std::vector<double> row(size_t r) const;

  DataTable select(const std::vector<std::string>& names) const;
  DataTable drop(const std::vector<std::string>& names) const;
  // Rows listed in `indices` (order given) vs. the rest (original order).
  std::pair<DataTable, DataTable> split_rows(const std::vector<size_t>& indices) const;
  DataTable take_rows(const std::vector<size_t>& indices) const;
  static DataTable concat_rows(const DataTable& a, const DataTable& b);

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  size_t n_rows_ = 0;
};

enum class MissingPolicy { error, drop_row };

struct LoadReport {
  size_t rows_read = 0;
  size_t rows_dropped = 0;
};

DataTable load_csv(const std::string& path, MissingPolicy policy = MissingPolicy::error,
                   LoadReport* report = nullptr);
void write_csv(const DataTable& table, const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace regbench
