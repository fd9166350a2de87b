#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "regbench/datatable.hpp"
#include "regbench/learners.hpp"
#include "regbench/stats.hpp"

namespace regbench::harness {

// Threads used for fold/candidate evaluation; REGBENCH_THREADS overrides.
// Thread count never changes results, only scheduling.
unsigned thread_count();
void set_thread_count(unsigned n);

struct FoldPlan {
  uint64_t seed = 0;
  int k = 0;
  std::vector<int> assignment;  // row index -> fold id

  std::vector<size_t> fold_rows(int fold) const;
  std::vector<size_t> complement_rows(int fold) const;
};

// SplitMix64-seeded Fisher-Yates shuffle dealt round-robin into k folds.
FoldPlan make_folds(size_t n_rows, int k, uint64_t seed);

std::vector<double> cross_validate(const DataTable& table, const std::string& response,
                                   const learners::LearnerConfig& config, const FoldPlan& plan);

// Exactly 20 candidate configurations per learner.
std::vector<learners::LearnerConfig> default_grid(learners::LearnerTag learner);

struct TuneResult {
  learners::LearnerConfig best;
  size_t best_index = 0;
  double best_mean_rmse = 0;
  std::vector<double> candidate_means;  // one per grid entry
};

TuneResult tune(const DataTable& table, const std::string& response,
                const std::vector<learners::LearnerConfig>& grid, uint64_t shared_seed,
                int k = 10);

struct CvOutcome {
  learners::LearnerTag tag = learners::LearnerTag::linear;
  learners::LearnerConfig config;
  std::vector<double> rmse_samples;  // repetition-major, fold-minor
  double mean = 0;
  double sd = 0;
};

struct ComparisonReport {
  std::string response;
  int k = 10;
  std::vector<uint64_t> repeat_seeds;
  uint64_t shared_tuning_seed = 0;
  std::string dataset_fingerprint;
  std::vector<CvOutcome> learners;          // input order
  stats::KruskalResult kruskal;
  std::vector<std::string> ranking;         // best mean RMSE first
};

ComparisonReport evaluate(const DataTable& table, const std::string& response,
                          const std::vector<learners::LearnerConfig>& configs, int k,
                          const std::vector<uint64_t>& repeat_seeds);

nlohmann::json report_to_json(const ComparisonReport& report);
ComparisonReport report_from_json(const nlohmann::json& j);

}  // namespace regbench::harness
