#include <benchmark/benchmark.h>

#include <cmath>

#include "regbench/harness.hpp"
#include "regbench/learners.hpp"
#include "regbench/rng.hpp"
#include "regbench/stats.hpp"

using namespace regbench;

namespace {

DataTable make_table(size_t n, size_t d, uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  for (size_t j = 0; j < d; ++j) {
    names.push_back("x" + std::to_string(j));
    std::vector<double> c(n);
    for (auto& v : c) v = rng.next_double();
    cols.push_back(std::move(c));
  }
  std::vector<double> y(n);
  for (size_t i = 0; i < n; ++i) {
    y[i] = 10 * std::sin(M_PI * cols[0][i] * cols[1 % d][i]) + 5 * cols[d - 1][i] +
           0.3 * rng.next_double();
  }
  names.push_back("y");
  cols.push_back(std::move(y));
  return DataTable(names, cols);
}

void BM_CartFit(benchmark::State& state) {
  auto table = make_table(static_cast<size_t>(state.range(0)), 8, 1);
  for (auto _ : state) {
    auto model = learners::fit_cart(table, "y", 8, 5, 0.0);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_CartFit)->Arg(500)->Arg(2000)->Arg(8000);

void BM_GbmFit(benchmark::State& state) {
  auto table = make_table(2000, 8, 2);
  for (auto _ : state) {
    auto model = learners::fit_gbm(table, "y", static_cast<int>(state.range(0)), 4, 0.1, 5,
                                   1.0, 7);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_GbmFit)->Arg(50)->Arg(200);

void BM_MarsFit(benchmark::State& state) {
  auto table = make_table(static_cast<size_t>(state.range(0)), 8, 3);
  for (auto _ : state) {
    auto model = learners::fit_mars(table, "y", 21, 2, 3.0);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_MarsFit)->Arg(500)->Arg(2000);

void BM_KendallTau(benchmark::State& state) {
  SplitMix64 rng(4);
  size_t n = static_cast<size_t>(state.range(0));
  std::vector<double> x(n), y(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(rng.next_below(1000));
    y[i] = static_cast<double>(rng.next_below(1000));
  }
  for (auto _ : state) {
    auto cell = stats::kendall_tau_b(x, y);
    benchmark::DoNotOptimize(cell);
  }
}
BENCHMARK(BM_KendallTau)->Arg(1000)->Arg(50000);

void BM_CrossValidate(benchmark::State& state) {
  auto table = make_table(1000, 8, 5);
  learners::LearnerConfig config;
  config.learner = learners::LearnerTag::cart;
  config.params["max_depth"] = 6;
  auto plan = harness::make_folds(table.n_rows(), 10, 9);
  for (auto _ : state) {
    auto rmses = harness::cross_validate(table, "y", config, plan);
    benchmark::DoNotOptimize(rmses);
  }
}
BENCHMARK(BM_CrossValidate);

}  // namespace

BENCHMARK_MAIN();
