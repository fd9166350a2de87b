#pragma once

#include <string>
#include <vector>

#include "regbench/datatable.hpp"

namespace regbench::stats {

enum class EffectSize { negligible, medium, high };
std::string effect_name(EffectSize e);

struct CorrelationCell {
  double tau = 0;
  double p_value = 1;
  EffectSize effect = EffectSize::negligible;
  bool significant = false;  // alpha = 0.05
};

// Moment skewness g1 = m3 / m2^(3/2); `adjusted` applies the
// Fisher-Pearson sample-size correction.
double skewness(const std::vector<double>& values, bool adjusted = false);

// Tau-b with tie-corrected normal-approximation p value. O(n log n).
CorrelationCell kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

std::vector<std::vector<CorrelationCell>> correlation_matrix(const DataTable& table);

double rmse(const std::vector<double>& predicted, const std::vector<double>& actual);

struct OlsReport {
  std::vector<double> coefficients;  // intercept first, then one per predictor
  std::vector<std::string> predictor_names;
  double r_squared = 0;
  double f_statistic = 0;
  int df_model = 0;
  int df_residual = 0;
  double p_value = 1;
  double residual_variance = 0;
};

// Least squares through Householder QR; near-zero diagonal entries are
// reported as collinearity naming the offending column.
OlsReport ols_fit(const DataTable& predictors, const std::vector<double>& response);
std::vector<double> ols_predict(const OlsReport& model, const DataTable& table);

// Weighted least squares on an explicit design matrix (no implicit
// intercept); shared by OLS and the IRLS loop.
std::vector<double> solve_least_squares(const std::vector<std::vector<double>>& design_columns,
                                        const std::vector<double>& response,
                                        const std::vector<std::string>& column_names);

struct PairwiseComparison {
  std::string a;
  std::string b;
  double z = 0;       // Dunn standardized rank-mean difference
  double p_adj = 1;   // Bonferroni, capped at 1
};

struct KruskalResult {
  double h_statistic = 0;  // tie-corrected
  int df = 0;
  double p_value = 1;
  std::vector<PairwiseComparison> pairwise;  // k(k-1)/2 entries
};

KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups,
                             const std::vector<std::string>& labels);

}  // namespace regbench::stats
