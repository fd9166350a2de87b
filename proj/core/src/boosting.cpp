#include <cmath>
#include <numeric>
#include <stdexcept>

#include "feature_view.hpp"
#include "regbench/learners.hpp"
#include "regbench/rng.hpp"

namespace regbench::learners {

namespace {

std::vector<size_t> all_rows(size_t n) {
  std::vector<size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

double trace_rmse(const std::vector<double>& fitted, const std::vector<double>& y) {
  double ss = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    double d = fitted[i] - y[i];
    ss += d * d;
  }
  return std::sqrt(ss / y.size());
}

}  // namespace

FittedModel fit_cart(const DataTable& table, const std::string& response, int max_depth,
                     int min_obs, double min_improve) {
  if (max_depth < 1 || min_obs < 1 || min_improve < 0)
    throw std::runtime_error("cart: invalid parameters");
  auto view = FeatureView::training(table, response);
  const std::vector<double>& y = table.column(response);
  if (y.size() < 2 * static_cast<size_t>(min_obs))
    throw std::runtime_error("cart: need at least 2*min_obs rows");

  CartParams params{max_depth, min_obs, min_improve};
  Tree tree = build_cart_tree(view.columns, y, all_rows(y.size()), params);

  FittedModel model;
  model.learner = LearnerTag::cart;
  model.config.learner = LearnerTag::cart;
  model.config.params = {{"max_depth", double(max_depth)},
                         {"min_obs", double(min_obs)},
                         {"min_improve", min_improve}};
  model.feature_names = view.names;
  model.structure = std::move(tree);
  model.iterations = 1;
  return model;
}

FittedModel fit_gbm(const DataTable& table, const std::string& response, int num_trees,
                    int interaction_depth, double shrinkage, int min_obs, double bag_fraction,
                    uint64_t seed) {
  if (num_trees < 1 || interaction_depth < 1 || min_obs < 1 || shrinkage <= 0 ||
      shrinkage > 1 || bag_fraction <= 0 || bag_fraction > 1)
    throw std::runtime_error("gbm: invalid parameters");
  auto view = FeatureView::training(table, response);
  const std::vector<double>& y = table.column(response);
  const size_t n = y.size();

  Ensemble ensemble;
  ensemble.shrinkage = shrinkage;
  ensemble.base = std::accumulate(y.begin(), y.end(), 0.0) / n;

  std::vector<double> fitted(n, ensemble.base);
  std::vector<double> residuals(n);
  SplitMix64 rng(seed);
  const size_t bag = static_cast<size_t>(std::ceil(bag_fraction * n));
  CartParams tree_params{interaction_depth, min_obs, 0.0};

  FittedModel model;
  model.learner = LearnerTag::gbm;
  model.feature_names = view.names;
  model.training_rmse_trace.reserve(num_trees);

  for (int m = 0; m < num_trees; ++m) {
    for (size_t i = 0; i < n; ++i) residuals[i] = y[i] - fitted[i];
    std::vector<size_t> rows =
        bag == n ? all_rows(n) : sample_without_replacement(n, bag, rng);
    Tree tree = build_cart_tree(view.columns, residuals, rows, tree_params);
    for (size_t i = 0; i < n; ++i) fitted[i] += shrinkage * tree.evaluate(view.columns, i);
    ensemble.trees.push_back(std::move(tree));
    model.training_rmse_trace.push_back(trace_rmse(fitted, y));
  }

  model.config.learner = LearnerTag::gbm;
  model.config.seed = seed;
  model.config.params = {{"num_trees", double(num_trees)},
                         {"interaction_depth", double(interaction_depth)},
                         {"shrinkage", shrinkage},
                         {"min_obs", double(min_obs)},
                         {"bag_fraction", bag_fraction}};
  model.iterations = num_trees;
  model.structure = std::move(ensemble);
  return model;
}

FittedModel fit_xgb(const DataTable& table, const std::string& response, int num_trees,
                    int max_depth, double eta, double lambda, double gamma,
                    double min_child_weight, double subsample, uint64_t seed) {
  if (num_trees < 1 || max_depth < 1 || eta <= 0 || eta > 1 || lambda < 0 || gamma < 0 ||
      min_child_weight < 0 || subsample <= 0 || subsample > 1)
    throw std::runtime_error("xgb: invalid parameters");
  auto view = FeatureView::training(table, response);
  const std::vector<double>& y = table.column(response);
  const size_t n = y.size();

  Ensemble ensemble;
  ensemble.shrinkage = eta;
  ensemble.base = std::accumulate(y.begin(), y.end(), 0.0) / n;

  std::vector<double> fitted(n, ensemble.base);
  std::vector<double> gradients(n);
  SplitMix64 rng(seed);
  const size_t bag = static_cast<size_t>(std::ceil(subsample * n));
  XgbParams tree_params{max_depth, lambda, gamma, min_child_weight};

  FittedModel model;
  model.learner = LearnerTag::xgb;
  model.feature_names = view.names;
  model.training_rmse_trace.reserve(num_trees);

  for (int m = 0; m < num_trees; ++m) {
    for (size_t i = 0; i < n; ++i) gradients[i] = fitted[i] - y[i];
    std::vector<size_t> rows =
        bag == n ? all_rows(n) : sample_without_replacement(n, bag, rng);
    Tree tree = build_xgb_tree(view.columns, gradients, rows, tree_params);
    for (size_t i = 0; i < n; ++i) fitted[i] += eta * tree.evaluate(view.columns, i);
    ensemble.trees.push_back(std::move(tree));
    model.training_rmse_trace.push_back(trace_rmse(fitted, y));
  }

  model.config.learner = LearnerTag::xgb;
  model.config.seed = seed;
  model.config.params = {{"num_trees", double(num_trees)}, {"max_depth", double(max_depth)},
                         {"eta", eta},                     {"lambda", lambda},
                         {"gamma", gamma},                 {"min_child_weight", min_child_weight},
                         {"subsample", subsample}};
  model.iterations = num_trees;
  model.structure = std::move(ensemble);
  return model;
}

}  // namespace regbench::learners
