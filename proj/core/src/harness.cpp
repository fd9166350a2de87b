#include "regbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <mutex>
#include <thread>

#include "regbench/rng.hpp"

namespace regbench::harness {

namespace {

unsigned g_threads = 0;  // 0 = unresolved

template <typename Fn>
void parallel_for(size_t n, Fn&& fn) {
  unsigned threads = thread_count();
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<size_t>(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

unsigned thread_count() {
  if (g_threads == 0) {
    if (const char* env = std::getenv("REGBENCH_THREADS")) {
      int v = std::atoi(env);
      if (v > 0) g_threads = static_cast<unsigned>(v);
    }
    if (g_threads == 0) g_threads = std::max(1u, std::thread::hardware_concurrency());
  }
  return g_threads;
}

void set_thread_count(unsigned n) { g_threads = n == 0 ? 1 : n; }

std::vector<size_t> FoldPlan::fold_rows(int fold) const {
  std::vector<size_t> rows;
  for (size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<size_t> FoldPlan::complement_rows(int fold) const {
  std::vector<size_t> rows;
  for (size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) rows.push_back(i);
  return rows;
}

FoldPlan make_folds(size_t n_rows, int k, uint64_t seed) {
  if (k < 2) throw std::runtime_error("make_folds: k must be at least 2");
  if (static_cast<size_t>(k) > n_rows) throw std::runtime_error("make_folds: k exceeds row count");
  std::vector<size_t> order(n_rows);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  fisher_yates_shuffle(order, rng);
  FoldPlan plan;
  plan.seed = seed;
  plan.k = k;
  plan.assignment.resize(n_rows);
  for (size_t i = 0; i < n_rows; ++i) plan.assignment[order[i]] = static_cast<int>(i % k);
  return plan;
}

std::vector<double> cross_validate(const DataTable& table, const std::string& response,
                                   const learners::LearnerConfig& config, const FoldPlan& plan) {
  if (plan.assignment.size() != table.n_rows())
    throw std::runtime_error("cross_validate: fold plan does not cover the table");
  std::vector<double> fold_rmse(plan.k);
  for (int f = 0; f < plan.k; ++f) {
    try {
      DataTable train = table.take_rows(plan.complement_rows(f));
      DataTable test = table.take_rows(plan.fold_rows(f));
      learners::FittedModel model = learners::fit(train, response, config);
      fold_rmse[f] = stats::rmse(learners::predict(model, test), test.column(response));
    } catch (const std::exception& e) {
      throw std::runtime_error("cross_validate: fold " + std::to_string(f) + ": " + e.what());
    }
  }
  return fold_rmse;
}

std::vector<learners::LearnerConfig> default_grid(learners::LearnerTag learner) {
  using learners::LearnerConfig;
  using learners::LearnerTag;
  std::vector<LearnerConfig> grid;
  auto add = [&](std::map<std::string, double> params) {
    LearnerConfig c;
    c.learner = learner;
    c.params = std::move(params);
    grid.push_back(std::move(c));
  };

  switch (learner) {
    case LearnerTag::linear:
      for (int i = 0; i < 20; ++i) add({});
      break;
    case LearnerTag::glm:
      for (int i = 0; i < 20; ++i) add({{"poisson", 0}});
      break;
    case LearnerTag::cart:
      // depth {2,4,6,8,12} x min_obs {5,20} x min_improve {0,1e-4} = 20.
      for (double imp : {0.0, 1e-4})
        for (int min_obs : {5, 20})
          for (int depth : {2, 4, 6, 8, 12})
            add({{"max_depth", double(depth)}, {"min_obs", double(min_obs)},
                 {"min_improve", imp}});
      break;
    case LearnerTag::earth:
      // max_terms {11,21,31,41} x degree {1,2} x penalty {2,3} = 16, padded
      // with the first four entries to keep every grid at 20.
      for (double penalty : {2.0, 3.0})
        for (int degree : {1, 2})
          for (int terms : {11, 21, 31, 41})
            add({{"max_terms", double(terms)}, {"max_degree", double(degree)},
                 {"gcv_penalty", penalty}});
      for (int i = 0; i < 4; ++i) grid.push_back(grid[i]);
      break;
    case LearnerTag::gbm:
      // trees {200,500,1000,2000} x depth {2,4,6} at shrinkage 0.1 (12),
      // extended with the first 8 pairs at shrinkage 0.05.
      for (double shrink : {0.1, 0.05}) {
        int added = 0;
        for (int trees : {200, 500, 1000, 2000}) {
          for (int depth : {2, 4, 6}) {
            if (shrink == 0.05 && added >= 8) break;
            add({{"num_trees", double(trees)}, {"interaction_depth", double(depth)},
                 {"shrinkage", shrink}, {"min_obs", 5}, {"bag_fraction", 0.5}});
            ++added;
          }
        }
      }
      break;
    case LearnerTag::xgb:
      for (double eta : {0.1, 0.05}) {
        int added = 0;
        for (int trees : {200, 500, 1000, 2000}) {
          for (int depth : {2, 4, 6}) {
            if (eta == 0.05 && added >= 8) break;
            add({{"num_trees", double(trees)}, {"max_depth", double(depth)}, {"eta", eta},
                 {"lambda", 1.0}, {"gamma", 0.0}, {"min_child_weight", 1.0},
                 {"subsample", 0.5}});
            ++added;
          }
        }
      }
      break;
  }
  if (grid.size() != 20) throw std::logic_error("default_grid: grid size != 20");
  return grid;
}

TuneResult tune(const DataTable& table, const std::string& response,
                const std::vector<learners::LearnerConfig>& grid, uint64_t shared_seed, int k) {
  if (grid.empty()) throw std::runtime_error("tune: empty grid");
  FoldPlan plan = make_folds(table.n_rows(), k, shared_seed);

  // One (candidate, fold) task per cell; reduction order is fixed by index.
  const size_t n_candidates = grid.size();
  std::vector<std::vector<double>> fold_rmse(n_candidates,
                                             std::vector<double>(plan.k, 0.0));
  std::vector<learners::LearnerConfig> seeded = grid;
  for (size_t c = 0; c < n_candidates; ++c) {
    if (seeded[c].seed == 0) seeded[c].seed = shared_seed + 1 + c;
  }
  parallel_for(n_candidates * plan.k, [&](size_t task) {
    size_t c = task / plan.k;
    int f = static_cast<int>(task % plan.k);
    DataTable train = table.take_rows(plan.complement_rows(f));
    DataTable test = table.take_rows(plan.fold_rows(f));
    learners::FittedModel model = learners::fit(train, response, seeded[c]);
    fold_rmse[c][f] = stats::rmse(learners::predict(model, test), test.column(response));
  });

  TuneResult result;
  result.candidate_means.resize(n_candidates);
  for (size_t c = 0; c < n_candidates; ++c) {
    result.candidate_means[c] =
        std::accumulate(fold_rmse[c].begin(), fold_rmse[c].end(), 0.0) / plan.k;
  }
  result.best_index = 0;
  for (size_t c = 1; c < n_candidates; ++c) {
    if (result.candidate_means[c] < result.candidate_means[result.best_index])
      result.best_index = c;  // strict <: ties keep the earliest grid entry
  }
  result.best = seeded[result.best_index];
  result.best_mean_rmse = result.candidate_means[result.best_index];
  return result;
}

ComparisonReport evaluate(const DataTable& table, const std::string& response,
                          const std::vector<learners::LearnerConfig>& configs, int k,
                          const std::vector<uint64_t>& repeat_seeds) {
  if (configs.size() < 2) throw std::runtime_error("evaluate: need at least 2 learners");
  if (repeat_seeds.size() < 2) throw std::runtime_error("evaluate: need at least 2 repeat seeds");
  for (size_t i = 0; i < repeat_seeds.size(); ++i)
    for (size_t j = i + 1; j < repeat_seeds.size(); ++j)
      if (repeat_seeds[i] == repeat_seeds[j])
        throw std::runtime_error("evaluate: repeat seeds must be distinct");

  std::vector<FoldPlan> plans;
  for (uint64_t seed : repeat_seeds) plans.push_back(make_folds(table.n_rows(), k, seed));

  ComparisonReport report;
  report.response = response;
  report.k = k;
  report.repeat_seeds = repeat_seeds;

  const size_t n_learners = configs.size();
  const size_t n_reps = plans.size();
  std::vector<std::vector<double>> samples(n_learners,
                                           std::vector<double>(n_reps * k, 0.0));
  parallel_for(n_learners * n_reps * k, [&](size_t task) {
    size_t l = task / (n_reps * k);
    size_t rep = (task / k) % n_reps;
    int f = static_cast<int>(task % k);
    const FoldPlan& plan = plans[rep];
    DataTable train = table.take_rows(plan.complement_rows(f));
    DataTable test = table.take_rows(plan.fold_rows(f));
    learners::FittedModel model = learners::fit(train, response, configs[l]);
    samples[l][rep * k + f] =
        stats::rmse(learners::predict(model, test), test.column(response));
  });

  std::vector<std::vector<double>> groups;
  std::vector<std::string> labels;
  for (size_t l = 0; l < n_learners; ++l) {
    CvOutcome outcome;
    outcome.tag = configs[l].learner;
    outcome.config = configs[l];
    outcome.rmse_samples = samples[l];
    outcome.mean = std::accumulate(samples[l].begin(), samples[l].end(), 0.0) / samples[l].size();
    double var = 0;
    for (double v : samples[l]) var += (v - outcome.mean) * (v - outcome.mean);
    outcome.sd = std::sqrt(var / (samples[l].size() - 1));
    report.learners.push_back(std::move(outcome));
    groups.push_back(samples[l]);
    labels.push_back(learners::tag_name(configs[l].learner));
  }

  report.kruskal = stats::kruskal_wallis(groups, labels);

  std::vector<size_t> order(n_learners);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return report.learners[a].mean < report.learners[b].mean;
  });
  for (size_t idx : order) report.ranking.push_back(labels[idx]);
  return report;
}

nlohmann::json report_to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["dataset_fingerprint"] = report.dataset_fingerprint;
  j["response"] = report.response;
  j["k"] = report.k;
  j["repeat_seeds"] = report.repeat_seeds;
  j["shared_tuning_seed"] = report.shared_tuning_seed;
  nlohmann::json learners_json = nlohmann::json::array();
  for (const auto& outcome : report.learners) {
    nlohmann::json lj;
    lj["tag"] = learners::tag_name(outcome.tag);
    lj["params"] = nlohmann::json::object();
    for (const auto& [name, value] : outcome.config.params) lj["params"][name] = value;
    lj["seed"] = outcome.config.seed;
    lj["rmse_samples"] = outcome.rmse_samples;
    lj["mean"] = outcome.mean;
    lj["sd"] = outcome.sd;
    learners_json.push_back(std::move(lj));
  }
  j["learners"] = std::move(learners_json);
  nlohmann::json pairwise = nlohmann::json::array();
  for (const auto& pc : report.kruskal.pairwise)
    pairwise.push_back({{"a", pc.a}, {"b", pc.b}, {"z", pc.z}, {"p_adj", pc.p_adj}});
  j["kruskal"] = {{"h", report.kruskal.h_statistic},
                  {"df", report.kruskal.df},
                  {"p", report.kruskal.p_value},
                  {"pairwise", std::move(pairwise)}};
  j["ranking"] = report.ranking;
  return j;
}

ComparisonReport report_from_json(const nlohmann::json& j) {
  ComparisonReport report;
  report.dataset_fingerprint = j.value("dataset_fingerprint", "");
  report.response = j.at("response").get<std::string>();
  report.k = j.at("k").get<int>();
  report.repeat_seeds = j.at("repeat_seeds").get<std::vector<uint64_t>>();
  report.shared_tuning_seed = j.value("shared_tuning_seed", 0ULL);
  for (const auto& lj : j.at("learners")) {
    CvOutcome outcome;
    outcome.tag = learners::tag_from_name(lj.at("tag").get<std::string>());
    outcome.config.learner = outcome.tag;
    for (const auto& [name, value] : lj.at("params").items())
      outcome.config.params[name] = value.get<double>();
    outcome.config.seed = lj.value("seed", 0ULL);
    outcome.rmse_samples = lj.at("rmse_samples").get<std::vector<double>>();
    outcome.mean = lj.at("mean").get<double>();
    outcome.sd = lj.at("sd").get<double>();
    report.learners.push_back(std::move(outcome));
  }
  const auto& kw = j.at("kruskal");
  report.kruskal.h_statistic = kw.at("h").get<double>();
  report.kruskal.df = kw.at("df").get<int>();
  report.kruskal.p_value = kw.at("p").get<double>();
  for (const auto& pc : kw.at("pairwise")) {
    report.kruskal.pairwise.push_back({pc.at("a").get<std::string>(),
                                       pc.at("b").get<std::string>(),
                                       pc.at("z").get<double>(),
                                       pc.at("p_adj").get<double>()});
  }
  report.ranking = j.at("ranking").get<std::vector<std::string>>();
  return report;
}

}  // namespace regbench::harness
