#pragma once

#include <string>
#include <vector>

#include "regbench/datatable.hpp"
#include "regbench/stats.hpp"

namespace regbench::atlm {

enum class Transform { none, log, sqrt };
std::string transform_name(Transform t);
Transform transform_from_name(const std::string& name);

struct ColumnTransform {
  std::string name;
  Transform transform = Transform::none;
  double skew_before = 0;
  double skew_after = 0;
};

struct TransformRecipe {
  double threshold = 1.0;
  std::vector<ColumnTransform> columns;
  // Set once the recipe has produced a transformed table; re-applying a
  // recipe to already transformed data is rejected upstream via this flag.
  bool applied = false;
};

// |skew| <= threshold keeps the column; otherwise try log (log1p), and fall
// back to sqrt when the logged column is still skewed.
ColumnTransform choose_transform(const std::vector<double>& column, const std::string& name,
                                 double threshold);

std::vector<double> apply_transform(const std::vector<double>& column, Transform tag);

TransformRecipe make_recipe(const DataTable& table, double threshold);
DataTable apply_recipe(const DataTable& table, TransformRecipe& recipe);

struct BaselineReport {
  TransformRecipe recipe;
  stats::OlsReport ols;
  std::string response_name;
};

// Transforms every column (response included) by the skewness rule, then
// regresses the remaining predictors on the transformed response.
BaselineReport build_baseline(const DataTable& table, const std::string& response_name,
                              double threshold);

}  // namespace regbench::atlm
