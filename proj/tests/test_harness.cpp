#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "regbench/harness.hpp"
#include "regbench/learners.hpp"
#include "regbench/rng.hpp"

using namespace regbench;
using learners::LearnerTag;

namespace {

DataTable friedman_like(size_t n, uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  std::vector<double> y(n);
  for (size_t i = 0; i < n; ++i) {
    for (auto& c : cols) c[i] = rng.next_double();
    y[i] = 10 * cols[0][i] * cols[1][i] + 5 * cols[2][i] +
           std::max(0.0, cols[3][i] - 0.5) * 8 + 0.2 * (rng.next_double() - 0.5);
  }
  return DataTable({"a", "b", "c", "d", "y"},
                   {cols[0], cols[1], cols[2], cols[3], y});
}

}  // namespace

TEST_CASE("harness: fold plan partitions rows with near-equal sizes") {
  auto plan = harness::make_folds(103, 10, 7);
  CHECK(plan.k == 10);
  CHECK(plan.assignment.size() == 103);
  std::vector<int> sizes(10, 0);
  for (int f : plan.assignment) {
    REQUIRE(f >= 0);
    REQUIRE(f < 10);
    sizes[f]++;
  }
  // 103 = 3*11 + 7*10, dealt round-robin: the first three folds take 11.
  CHECK(sizes == std::vector<int>{11, 11, 11, 10, 10, 10, 10, 10, 10, 10});
  // fold_rows/complement_rows partition 0..n-1 exactly.
  std::set<size_t> all;
  for (int f = 0; f < 10; ++f) {
    auto test_rows = plan.fold_rows(f);
    auto train_rows = plan.complement_rows(f);
    CHECK(test_rows.size() + train_rows.size() == 103);
    for (size_t r : test_rows) CHECK(all.insert(r).second);
  }
  CHECK(all.size() == 103);
}

TEST_CASE("harness: fold plans are seed-deterministic and seed-sensitive") {
  auto a = harness::make_folds(50, 5, 3);
  auto b = harness::make_folds(50, 5, 3);
  auto c = harness::make_folds(50, 5, 4);
  CHECK(a.assignment == b.assignment);
  CHECK(a.assignment != c.assignment);
}

TEST_CASE("harness: default grids have exactly 20 candidates") {
  for (auto tag : {LearnerTag::linear, LearnerTag::glm, LearnerTag::cart, LearnerTag::earth,
                   LearnerTag::gbm, LearnerTag::xgb}) {
    auto grid = harness::default_grid(tag);
    CHECK(grid.size() == 20);
    for (const auto& config : grid) {
      CHECK(config.learner == tag);
      config.validate();
    }
  }
}

TEST_CASE("harness: cross_validate returns one rmse per fold") {
  auto table = friedman_like(80, 2);
  learners::LearnerConfig config;
  config.learner = LearnerTag::cart;
  config.params["max_depth"] = 4;
  auto plan = harness::make_folds(table.n_rows(), 5, 11);
  auto rmses = harness::cross_validate(table, "y", config, plan);
  REQUIRE(rmses.size() == 5);
  for (double r : rmses) CHECK(r > 0);
  // Same plan, same config: identical samples.
  CHECK(harness::cross_validate(table, "y", config, plan) == rmses);
}

TEST_CASE("harness: tune picks the grid minimiser with earliest-index ties") {
  auto table = friedman_like(120, 9);
  // linear's grid is 20 identical configs; the tie-break must pick index 0.
  auto linear_grid = harness::default_grid(LearnerTag::linear);
  auto tied = harness::tune(table, "y", linear_grid, 5, 5);
  CHECK(tied.best_index == 0);
  REQUIRE(tied.candidate_means.size() == 20);

  auto cart_grid = harness::default_grid(LearnerTag::cart);
  auto result = harness::tune(table, "y", cart_grid, 5, 5);
  double best = *std::min_element(result.candidate_means.begin(), result.candidate_means.end());
  CHECK(result.best_mean_rmse == best);
  CHECK(result.candidate_means[result.best_index] == best);
}

TEST_CASE("harness: evaluate produces the full comparison report") {
  auto table = friedman_like(90, 13);
  std::vector<learners::LearnerConfig> configs(3);
  configs[0].learner = LearnerTag::linear;
  configs[1].learner = LearnerTag::glm;
  configs[2].learner = LearnerTag::cart;
  configs[2].params["max_depth"] = 4;
  auto report = harness::evaluate(table, "y", configs, 5, {101, 202});

  CHECK(report.k == 5);
  CHECK(report.repeat_seeds == std::vector<uint64_t>{101, 202});
  REQUIRE(report.learners.size() == 3);
  for (const auto& outcome : report.learners) {
    CHECK(outcome.rmse_samples.size() == 10);  // 2 repetitions x 5 folds
    double mean = std::accumulate(outcome.rmse_samples.begin(), outcome.rmse_samples.end(), 0.0) /
                  outcome.rmse_samples.size();
    CHECK(outcome.mean == doctest::Approx(mean).epsilon(1e-12));
  }
  // linear and glm(gaussian) share every sample: Dunn z = 0, p_adj = 1.
  bool found_pair = false;
  for (const auto& pc : report.kruskal.pairwise) {
    if ((pc.a == "linear" && pc.b == "glm") || (pc.a == "glm" && pc.b == "linear")) {
      found_pair = true;
      CHECK(pc.z == 0.0);
      CHECK(pc.p_adj == 1.0);
    }
  }
  CHECK(found_pair);
  CHECK(report.ranking.size() == 3);
  CHECK(report.kruskal.df == 2);
  // Repeat seeds must be distinct.
  CHECK_THROWS(harness::evaluate(table, "y", configs, 5, {101, 101}));
}

TEST_CASE("harness: thread count does not change evaluate results") {
  auto table = friedman_like(70, 21);
  std::vector<learners::LearnerConfig> configs(2);
  configs[0].learner = LearnerTag::cart;
  configs[0].params["max_depth"] = 3;
  configs[1].learner = LearnerTag::gbm;
  configs[1].params["num_trees"] = 15;
  configs[1].seed = 5;

  unsigned saved = harness::thread_count();
  harness::set_thread_count(1);
  auto serial = harness::evaluate(table, "y", configs, 4, {1, 2});
  harness::set_thread_count(8);
  auto parallel = harness::evaluate(table, "y", configs, 4, {1, 2});
  harness::set_thread_count(saved);

  CHECK(harness::report_to_json(serial).dump() == harness::report_to_json(parallel).dump());
}

TEST_CASE("harness: report json round trip") {
  auto table = friedman_like(60, 33);
  std::vector<learners::LearnerConfig> configs(2);
  configs[0].learner = LearnerTag::linear;
  configs[1].learner = LearnerTag::cart;
  auto report = harness::evaluate(table, "y", configs, 4, {9, 10});
  report.dataset_fingerprint = "deadbeef";
  report.shared_tuning_seed = 77;
  auto j = harness::report_to_json(report);
  auto back = harness::report_from_json(j);
  CHECK(harness::report_to_json(back).dump() == j.dump());
  CHECK(back.dataset_fingerprint == "deadbeef");
  CHECK(back.ranking == report.ranking);
  CHECK(back.learners[1].rmse_samples == report.learners[1].rmse_samples);
}
