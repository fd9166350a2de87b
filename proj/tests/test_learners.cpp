#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "regbench/learners.hpp"
#include "regbench/rng.hpp"
#include "regbench/stats.hpp"

using namespace regbench;
using learners::LearnerTag;

namespace {

DataTable random_table(size_t n, size_t d, uint64_t seed, bool nonlinear = false) {
  SplitMix64 rng(seed);
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  for (size_t j = 0; j < d; ++j) {
    names.push_back("x" + std::to_string(j));
    std::vector<double> c(n);
    for (size_t i = 0; i < n; ++i) c[i] = rng.next_double() * 10 - 5;
    cols.push_back(std::move(c));
  }
  std::vector<double> y(n);
  for (size_t i = 0; i < n; ++i) {
    y[i] = 0.5 + 0.1 * rng.next_double();
    for (size_t j = 0; j < d; ++j) {
      double v = cols[j][i];
      y[i] += nonlinear ? std::max(0.0, v) * (j + 1) : (j + 1) * v;
    }
  }
  names.push_back("y");
  cols.push_back(std::move(y));
  return DataTable(names, cols);
}

// Exhaustive SSE scan over every feature and midpoint threshold.
struct BestSplit {
  int feature = -1;
  double threshold = 0;
  double sse = 0;
};

BestSplit exhaustive_root_split(const DataTable& table, const std::string& response,
                                int min_obs) {
  std::vector<const std::vector<double>*> features;
  std::vector<int> feature_ids;
  for (size_t j = 0; j < table.n_cols(); ++j) {
    if (table.names()[j] == response) continue;
    features.push_back(&table.column(j));
    feature_ids.push_back(static_cast<int>(feature_ids.size()));
  }
  const auto& y = table.column(response);
  size_t n = y.size();
  double total_sum = std::accumulate(y.begin(), y.end(), 0.0);
  double total_sq = 0;
  for (double v : y) total_sq += v * v;
  double base_sse = total_sq - total_sum * total_sum / n;

  BestSplit best;
  best.sse = base_sse;
  for (size_t f = 0; f < features.size(); ++f) {
    std::vector<double> values = *features[f];
    std::vector<double> distinct = values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (size_t k = 0; k + 1 < distinct.size(); ++k) {
      double threshold = (distinct[k] + distinct[k + 1]) / 2;
      double lsum = 0, lsq = 0;
      size_t ln = 0;
      for (size_t i = 0; i < n; ++i) {
        if (values[i] < threshold) {
          lsum += y[i];
          lsq += y[i] * y[i];
          ln++;
        }
      }
      size_t rn = n - ln;
      if (ln < static_cast<size_t>(min_obs) || rn < static_cast<size_t>(min_obs)) continue;
      double rsum = total_sum - lsum, rsq = total_sq - lsq;
      double sse = (lsq - lsum * lsum / ln) + (rsq - rsum * rsum / rn);
      // Same documented tie rule as the builder: scores within a relative
      // 1e-9 of the node SSE are tied and the earliest candidate stays.
      if (sse < best.sse - 1e-9 * std::max(1.0, base_sse)) {
        best.sse = sse;
        best.feature = static_cast<int>(f);
        best.threshold = threshold;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("learners: cart root split equals exhaustive enumeration") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 4 + rng.next_below(57);
    size_t d = 1 + rng.next_below(4);
    auto table = random_table(n, d, 1000 + trial, true);
    auto fitted = learners::fit_cart(table, "y", 1, 2, 0.0);
    const auto& tree = std::get<learners::Tree>(fitted.structure);
    auto oracle = exhaustive_root_split(table, "y", 2);
    if (oracle.feature < 0) {
      CHECK(tree.nodes[0].feature == -1);
    } else {
      REQUIRE(tree.nodes[0].feature >= 0);
      CHECK(tree.nodes[0].feature == oracle.feature);
      CHECK(tree.nodes[0].threshold == oracle.threshold);
    }
  }
}

TEST_CASE("learners: cart leaf values are routed-row means") {
  DataTable t({"x", "y"}, {{1, 2, 3, 10, 11, 12}, {1, 1, 1, 5, 5, 8}});
  auto fitted = learners::fit_cart(t, "y", 1, 3, 0.0);
  const auto& tree = std::get<learners::Tree>(fitted.structure);
  REQUIRE(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == 6.5);
  const auto& left = tree.nodes[tree.nodes[0].left];
  const auto& right = tree.nodes[tree.nodes[0].right];
  CHECK(left.value == doctest::Approx(1.0));
  CHECK(left.count == 3);
  CHECK(right.value == doctest::Approx(6.0));
  auto preds = learners::predict(fitted, t);
  CHECK(preds == std::vector<double>{1, 1, 1, 6, 6, 6});
}

TEST_CASE("learners: cart respects depth, min_obs, and min_improve") {
  auto table = random_table(120, 3, 55, true);
  auto shallow = learners::fit_cart(table, "y", 2, 5, 0.0);
  const auto& tree = std::get<learners::Tree>(shallow.structure);
  // No path may exceed depth 2.
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    const auto& node = tree.nodes[idx];
    CHECK(depth <= 2);
    if (node.feature >= 0) {
      stack.push_back({node.left, depth + 1});
      stack.push_back({node.right, depth + 1});
    } else {
      CHECK(node.count >= 5);
    }
  }
  // A huge min_improve forces a single-leaf tree.
  auto stump = learners::fit_cart(table, "y", 6, 5, 1e12);
  CHECK(std::get<learners::Tree>(stump.structure).nodes.size() == 1);
}

TEST_CASE("learners: glm gaussian equals linear") {
  for (int trial = 0; trial < 100; ++trial) {
    auto table = random_table(30, 3, 500 + trial);
    auto lin = learners::fit_linear(table, "y");
    auto glm = learners::fit_glm(table, "y", "gaussian-identity");
    auto pl = learners::predict(lin, table);
    auto pg = learners::predict(glm, table);
    for (size_t i = 0; i < pl.size(); ++i)
      CHECK(pg[i] == doctest::Approx(pl[i]).epsilon(1e-8));
  }
}

TEST_CASE("learners: poisson glm recovers log-linear rates") {
  SplitMix64 rng(77);
  size_t n = 400;
  std::vector<double> x(n), y(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = rng.next_double() * 2;
    double mu = std::exp(0.3 + 0.8 * x[i]);
    // Deterministic pseudo-Poisson: rounded rate keeps the IRLS target clean.
    y[i] = std::floor(mu + rng.next_double());
  }
  DataTable t({"x", "y"}, {x, y});
  auto fitted = learners::fit_glm(t, "y", "poisson-log");
  const auto& glm = std::get<learners::GlmModel>(fitted.structure);
  CHECK(glm.family == "poisson-log");
  CHECK(glm.coef[0] == doctest::Approx(0.3).epsilon(0.25));
  CHECK(glm.coef[1] == doctest::Approx(0.8).epsilon(0.15));
  auto preds = learners::predict(fitted, t);
  for (double p : preds) CHECK(p > 0);  // log link keeps predictions positive
}

TEST_CASE("learners: gbm training trace is nonincreasing without bagging") {
  for (int trial = 0; trial < 50; ++trial) {
    auto table = random_table(60, 3, 900 + trial, true);
    auto fitted = learners::fit_gbm(table, "y", 40, 3, 0.1, 5, 1.0, 0);
    const auto& trace = fitted.training_rmse_trace;
    REQUIRE(trace.size() == 40);
    for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
  }
}

TEST_CASE("learners: gbm base prediction is the response mean") {
  auto table = random_table(80, 2, 4, true);
  auto fitted = learners::fit_gbm(table, "y", 5, 2, 0.1, 5, 1.0, 3);
  const auto& ens = std::get<learners::Ensemble>(fitted.structure);
  const auto& y = table.column("y");
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  CHECK(ens.base == doctest::Approx(mean).epsilon(1e-12));
  CHECK(ens.shrinkage == 0.1);
  CHECK(ens.trees.size() == 5);
}

TEST_CASE("learners: xgb degenerate config equals gbm") {
  for (int trial = 0; trial < 40; ++trial) {
    auto table = random_table(50, 3, 1300 + trial, true);
    auto gbm = learners::fit_gbm(table, "y", 1, 1, 1.0, 1, 1.0, 0);
    auto xgb = learners::fit_xgb(table, "y", 1, 1, 1.0, 0.0, 0.0, 0.0, 1.0, 0);
    auto pg = learners::predict(gbm, table);
    auto px = learners::predict(xgb, table);
    for (size_t i = 0; i < pg.size(); ++i)
      CHECK(px[i] == doctest::Approx(pg[i]).epsilon(1e-10));
  }
}

TEST_CASE("learners: xgb regularization shrinks leaf weights") {
  auto table = random_table(100, 2, 21, true);
  auto loose = learners::fit_xgb(table, "y", 1, 2, 1.0, 0.0, 0.0, 0.0, 1.0, 0);
  auto tight = learners::fit_xgb(table, "y", 1, 2, 1.0, 1000.0, 0.0, 0.0, 1.0, 0);
  auto pl = learners::predict(loose, table);
  auto pt = learners::predict(tight, table);
  const auto& y = table.column("y");
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double spread_loose = 0, spread_tight = 0;
  for (size_t i = 0; i < pl.size(); ++i) {
    spread_loose += std::abs(pl[i] - mean);
    spread_tight += std::abs(pt[i] - mean);
  }
  CHECK(spread_tight < spread_loose * 0.1);
}

TEST_CASE("learners: xgb gamma can suppress all splits") {
  auto table = random_table(60, 2, 22, true);
  auto fitted = learners::fit_xgb(table, "y", 1, 4, 1.0, 0.0, 1e12, 0.0, 1.0, 0);
  const auto& ens = std::get<learners::Ensemble>(fitted.structure);
  CHECK(ens.trees[0].nodes.size() == 1);
}

TEST_CASE("learners: mars recovers a single hinge") {
  SplitMix64 rng(17);
  size_t n = 500;
  std::vector<double> x(n), y(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = rng.next_double() * 6 - 1;  // covers the knot at 2
    double noise = 0.0;
    for (int k = 0; k < 12; ++k) noise += rng.next_double() - 0.5;
    y[i] = std::max(0.0, x[i] - 2.0) + 0.01 * noise;
  }
  DataTable t({"x", "y"}, {x, y});
  auto fitted = learners::fit_mars(t, "y", 21, 1, 3.0);
  const auto& model = std::get<learners::MarsModel>(fitted.structure);
  bool found = false;
  for (const auto& basis : model.bases) {
    for (const auto& factor : basis.factors) {
      if (factor.direction == 1 && std::abs(factor.knot - 2.0) < 0.1) found = true;
    }
  }
  CHECK(found);
  auto preds = learners::predict(fitted, t);
  double sse = 0, sst = 0, mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  for (size_t i = 0; i < n; ++i) {
    sse += (y[i] - preds[i]) * (y[i] - preds[i]);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  CHECK(1 - sse / sst > 0.99);
}

TEST_CASE("learners: mars gcv formula") {
  // GCV = (SSE/n) / (1 - C(M)/n)^2 with C(M) = M + penalty*(M-1)/2.
  double gcv = learners::mars_gcv(10.0, 100, 5, 3.0);
  double c = 5 + 3.0 * (5 - 1) / 2.0;
  CHECK(gcv == doctest::Approx((10.0 / 100) / std::pow(1 - c / 100, 2)).epsilon(1e-12));
}

TEST_CASE("learners: mars basis evaluation") {
  std::vector<double> col = {1.0, 5.0};
  std::vector<const std::vector<double>*> cols = {&col};
  learners::MarsBasis constant;
  CHECK(learners::evaluate_mars_basis(constant, cols, 0) == 1.0);
  learners::MarsBasis hinge;
  hinge.factors.push_back({0, 3.0, 1});
  CHECK(learners::evaluate_mars_basis(hinge, cols, 0) == 0.0);
  CHECK(learners::evaluate_mars_basis(hinge, cols, 1) == 2.0);
  learners::MarsBasis mirrored;
  mirrored.factors.push_back({0, 3.0, -1});
  CHECK(learners::evaluate_mars_basis(mirrored, cols, 0) == 2.0);
  CHECK(learners::evaluate_mars_basis(mirrored, cols, 1) == 0.0);
}

TEST_CASE("learners: prediction binds features by name, not position") {
  auto table = random_table(40, 2, 61);
  auto fitted = learners::fit_linear(table, "y");
  auto swapped = table.select({"x1", "y", "x0"});
  auto p1 = learners::predict(fitted, table);
  auto p2 = learners::predict(fitted, swapped);
  CHECK(p1 == p2);
  DataTable missing({"x0", "y"}, {table.column("x0"), table.column("y")});
  CHECK_THROWS_WITH_AS(learners::predict(fitted, missing), doctest::Contains("x1"),
                       std::runtime_error);
}

TEST_CASE("learners: config dispatch and validation") {
  auto table = random_table(60, 2, 71, true);
  for (auto tag : {LearnerTag::linear, LearnerTag::glm, LearnerTag::cart, LearnerTag::earth,
                   LearnerTag::gbm, LearnerTag::xgb}) {
    learners::LearnerConfig config;
    config.learner = tag;
    config.seed = 9;
    if (tag == LearnerTag::gbm || tag == LearnerTag::xgb) config.params["num_trees"] = 10;
    auto fitted = learners::fit(table, "y", config);
    CHECK(fitted.learner == tag);
    auto preds = learners::predict(fitted, table);
    CHECK(preds.size() == table.n_rows());
  }
  learners::LearnerConfig bad;
  bad.learner = LearnerTag::gbm;
  bad.params["shrinkage"] = -1.0;
  CHECK_THROWS(bad.validate());
  learners::LearnerConfig bad2;
  bad2.learner = LearnerTag::cart;
  bad2.params["max_depth"] = 0;
  CHECK_THROWS(bad2.validate());
}

TEST_CASE("learners: tag names round trip") {
  for (auto tag : {LearnerTag::linear, LearnerTag::glm, LearnerTag::cart, LearnerTag::earth,
                   LearnerTag::gbm, LearnerTag::xgb})
    CHECK(learners::tag_from_name(learners::tag_name(tag)) == tag);
  CHECK_THROWS(learners::tag_from_name("forest"));
}

TEST_CASE("learners: gbm bagging is seed-deterministic") {
  auto table = random_table(80, 3, 83, true);
  auto a = learners::fit_gbm(table, "y", 10, 3, 0.1, 5, 0.5, 42);
  auto b = learners::fit_gbm(table, "y", 10, 3, 0.1, 5, 0.5, 42);
  auto c = learners::fit_gbm(table, "y", 10, 3, 0.1, 5, 0.5, 43);
  CHECK(learners::predict(a, table) == learners::predict(b, table));
  CHECK(learners::predict(a, table) != learners::predict(c, table));
}
