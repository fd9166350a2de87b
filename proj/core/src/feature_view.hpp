#pragma once

#include <string>
#include <vector>

#include "regbench/datatable.hpp"

namespace regbench::learners {

// Feature columns bound by name; missing columns error with the name.
struct FeatureView {
  std::vector<std::string> names;
  std::vector<const std::vector<double>*> columns;

  static FeatureView training(const DataTable& table, const std::string& response) {
    FeatureView view;
    table.column_index(response);  // validate
    for (const auto& name : table.names()) {
      if (name == response) continue;
      view.names.push_back(name);
      view.columns.push_back(&table.column(name));
    }
    if (view.names.empty()) throw std::runtime_error("fit: no feature columns");
    return view;
  }

  static FeatureView bind(const DataTable& table, const std::vector<std::string>& names) {
    FeatureView view;
    view.names = names;
    for (const auto& name : names) {
      if (!table.has_column(name))
        throw std::runtime_error("predict: missing feature column '" + name + "'");
      view.columns.push_back(&table.column(name));
    }
    return view;
  }
};

}  // namespace regbench::learners
