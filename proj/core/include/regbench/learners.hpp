#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "regbench/datatable.hpp"
#include "regbench/stats.hpp"

namespace regbench::learners {

enum class LearnerTag { linear, glm, cart, earth, gbm, xgb };
std::string tag_name(LearnerTag tag);
LearnerTag tag_from_name(const std::string& name);

struct LearnerConfig {
  LearnerTag learner = LearnerTag::linear;
  std::map<std::string, double> params;
  uint64_t seed = 0;

  double param(const std::string& name, double fallback) const;
  int iparam(const std::string& name, int fallback) const;
  void validate() const;
};

// ---- learned structures ----

struct LinearModel {
  std::vector<double> coef;  // intercept first
};

struct GlmModel {
  std::vector<double> coef;
  std::string family;  // "gaussian-identity" | "poisson-log"
  int iterations = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;    // leaf prediction
  size_t count = 0;    // training rows routed here
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root; empty means zero tree
  double evaluate(const std::vector<const std::vector<double>*>& columns, size_t row) const;
};

struct HingeFactor {
  int feature = 0;
  double knot = 0;
  int direction = 1;  // +1: max(0, x-t); -1: max(0, t-x)
};

struct MarsBasis {
  std::vector<HingeFactor> factors;  // empty list is the constant term
};

struct MarsModel {
  std::vector<MarsBasis> bases;  // bases[0] is the constant term
  std::vector<double> coef;     // one per basis
};

struct Ensemble {
  double base = 0;       // initial prediction F0
  double shrinkage = 1;  // per-tree multiplier
  std::vector<Tree> trees;
};

struct FittedModel {
  LearnerTag learner = LearnerTag::linear;
  LearnerConfig config;
  std::vector<std::string> feature_names;
  std::variant<LinearModel, GlmModel, Tree, MarsModel, Ensemble> structure;
  std::vector<double> training_rmse_trace;  // per boosting iteration
  int iterations = 0;
};

// ---- fitting ----
// Every fit_* takes the full table; the response column is excluded from the
// features and the rest participate by name.

FittedModel fit_linear(const DataTable& table, const std::string& response);
FittedModel fit_glm(const DataTable& table, const std::string& response,
                    const std::string& family);
FittedModel fit_cart(const DataTable& table, const std::string& response, int max_depth,
                     int min_obs, double min_improve);
FittedModel fit_mars(const DataTable& table, const std::string& response, int max_terms,
                     int max_degree, double gcv_penalty);
FittedModel fit_gbm(const DataTable& table, const std::string& response, int num_trees,
                    int interaction_depth, double shrinkage, int min_obs, double bag_fraction,
                    uint64_t seed);
FittedModel fit_xgb(const DataTable& table, const std::string& response, int num_trees,
                    int max_depth, double eta, double lambda, double gamma,
                    double min_child_weight, double subsample, uint64_t seed);

FittedModel fit(const DataTable& table, const std::string& response, const LearnerConfig& config);

std::vector<double> predict(const FittedModel& model, const DataTable& table);

// ---- tree building internals, shared with tests ----

struct CartParams {
  int max_depth = 6;
  int min_obs = 5;
  double min_improve = 0;
};

Tree build_cart_tree(const std::vector<const std::vector<double>*>& columns,
                     const std::vector<double>& targets, const std::vector<size_t>& rows,
                     const CartParams& params);

struct XgbParams {
  int max_depth = 6;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
};

// Second-order tree on gradients g with unit hessians.
Tree build_xgb_tree(const std::vector<const std::vector<double>*>& columns,
                    const std::vector<double>& gradients, const std::vector<size_t>& rows,
                    const XgbParams& params);

double evaluate_mars_basis(const MarsBasis& basis,
                           const std::vector<const std::vector<double>*>& columns, size_t row);
double mars_gcv(double sse, size_t n, size_t n_terms, double penalty);

}  // namespace regbench::learners
