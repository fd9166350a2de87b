#include "regbench/atlm.hpp"

#include <cmath>
#include <stdexcept>

namespace regbench::atlm {

std::string transform_name(Transform t) {
  switch (t) {
    case Transform::none: return "none";
    case Transform::log: return "log";
    case Transform::sqrt: return "sqrt";
  }
  return "none";
}

Transform transform_from_name(const std::string& name) {
  if (name == "none") return Transform::none;
  if (name == "log") return Transform::log;
  if (name == "sqrt") return Transform::sqrt;
  throw std::runtime_error("unknown transform tag '" + name + "'");
}

std::vector<double> apply_transform(const std::vector<double>& column, Transform tag) {
  if (tag == Transform::none) return column;
  std::vector<double> out(column.size());
  for (size_t i = 0; i < column.size(); ++i) {
    double v = column[i];
    if (tag == Transform::log) {
      if (v < -1.0 + 1e-300)
        throw std::runtime_error("log transform: value <= -1 at row " + std::to_string(i));
      out[i] = std::log1p(v);
    } else {
      if (v < 0)
        throw std::runtime_error("sqrt transform: negative value at row " + std::to_string(i));
      out[i] = std::sqrt(v);
    }
  }
  return out;
}

ColumnTransform choose_transform(const std::vector<double>& column, const std::string& name,
                                 double threshold) {
  ColumnTransform ct;
  ct.name = name;
  ct.skew_before = stats::skewness(column);
  if (std::fabs(ct.skew_before) <= threshold) {
    ct.transform = Transform::none;
    ct.skew_after = ct.skew_before;
    return ct;
  }
  auto logged = apply_transform(column, Transform::log);
  double log_skew = stats::skewness(logged);
  if (std::fabs(log_skew) <= threshold) {
    ct.transform = Transform::log;
    ct.skew_after = log_skew;
  } else {
    ct.transform = Transform::sqrt;
    ct.skew_after = stats::skewness(apply_transform(column, Transform::sqrt));
  }
  return ct;
}

TransformRecipe make_recipe(const DataTable& table, double threshold) {
  TransformRecipe recipe;
  recipe.threshold = threshold;
  for (size_t c = 0; c < table.n_cols(); ++c)
    recipe.columns.push_back(choose_transform(table.column(c), table.names()[c], threshold));
  return recipe;
}

DataTable apply_recipe(const DataTable& table, TransformRecipe& recipe) {
  if (recipe.applied)
    throw std::runtime_error("recipe already applied: refusing to transform twice");
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  for (const auto& ct : recipe.columns) {
    names.push_back(ct.name);
    cols.push_back(apply_transform(table.column(ct.name), ct.transform));
  }
  recipe.applied = true;
  return DataTable(std::move(names), std::move(cols));
}

BaselineReport build_baseline(const DataTable& table, const std::string& response_name,
                              double threshold) {
  table.column_index(response_name);  // validate
  if (table.n_cols() < 3) throw std::runtime_error("baseline: need at least 2 predictors");

  BaselineReport report;
  report.response_name = response_name;
  report.recipe = make_recipe(table, threshold);
  DataTable transformed = apply_recipe(table, report.recipe);

  // The violation categories are components of total_violations; they stay
  // out of the attribute regression.
  std::vector<std::string> dropped = {response_name};
  if (response_name == "total_violations") {
    for (const std::string cat : {"reliability", "readability", "performance", "security"})
      if (transformed.has_column(cat)) dropped.push_back(cat);
  }
  DataTable predictors = transformed.drop(dropped);
  report.ols = stats::ols_fit(predictors, transformed.column(response_name));
  return report;
}

}  // namespace regbench::atlm
