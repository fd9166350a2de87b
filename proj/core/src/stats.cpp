#include "regbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "regbench/numeric.hpp"

namespace regbench::stats {

namespace {

bool is_constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

std::string effect_name(EffectSize e) {
  switch (e) {
    case EffectSize::negligible: return "negligible";
    case EffectSize::medium: return "medium";
    case EffectSize::high: return "high";
  }
  return "negligible";
}

double skewness(const std::vector<double>& values, bool adjusted) {
  const size_t n = values.size();
  if (n < 3) throw std::runtime_error("skewness: need at least 3 values");
  if (is_constant(values)) throw std::runtime_error("skewness: degenerate (constant) column");
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double m2 = 0, m3 = 0;
  for (double v : values) {
    double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  double g1 = m3 / std::pow(m2, 1.5);
  if (adjusted) g1 *= std::sqrt(static_cast<double>(n) * (n - 1)) / (n - 2);
  return g1;
}

namespace {

// Merge sort counting the exchanges a bubble sort would need; this is the
// discordant-pair count once the data is ordered by the other variable.
uint64_t count_inversions(std::vector<double>& v, std::vector<double>& buf, size_t lo, size_t hi) {
  if (hi - lo < 2) return 0;
  size_t mid = lo + (hi - lo) / 2;
  uint64_t count = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      buf[k++] = v[j++];
      count += mid - i;
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return count;
}

struct TieStats {
  double sum_t2 = 0;   // sum t(t-1)/2
  double sum_v = 0;    // sum t(t-1)(2t+5)
  double sum_t12 = 0;  // sum t(t-1)
  double sum_t123 = 0; // sum t(t-1)(t-2)
};

template <typename Less, typename Eq>
TieStats tie_stats(size_t n, Less less_at, Eq eq_at, std::vector<size_t>& order) {
  std::sort(order.begin(), order.end(), less_at);
  TieStats ts;
  size_t i = 0;
  while (i < n) {
    size_t j = i + 1;
    while (j < n && eq_at(order[i], order[j])) ++j;
    double t = static_cast<double>(j - i);
    ts.sum_t2 += t * (t - 1) / 2;
    ts.sum_v += t * (t - 1) * (2 * t + 5);
    ts.sum_t12 += t * (t - 1);
    ts.sum_t123 += t * (t - 1) * (t - 2);
    i = j;
  }
  return ts;
}

}  // namespace

CorrelationCell kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n != y.size()) throw std::runtime_error("kendall: length mismatch");
  if (n < 2) throw std::runtime_error("kendall: need at least 2 observations");
  if (is_constant(x) || is_constant(y))
    throw std::runtime_error("kendall: degenerate (constant) column");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  const double n0 = static_cast<double>(n) * (n - 1) / 2;

  // Tie runs in x, in y, and in (x, y) jointly.
  TieStats tx;
  {
    size_t i = 0;
    while (i < n) {
      size_t j = i + 1;
      while (j < n && x[order[j]] == x[order[i]]) ++j;
      double t = static_cast<double>(j - i);
      tx.sum_t2 += t * (t - 1) / 2;
      tx.sum_v += t * (t - 1) * (2 * t + 5);
      tx.sum_t12 += t * (t - 1);
      tx.sum_t123 += t * (t - 1) * (t - 2);
      i = j;
    }
  }
  double n3 = 0;
  {
    size_t i = 0;
    while (i < n) {
      size_t j = i + 1;
      while (j < n && x[order[j]] == x[order[i]] && y[order[j]] == y[order[i]]) ++j;
      double t = static_cast<double>(j - i);
      n3 += t * (t - 1) / 2;
      i = j;
    }
  }
  std::vector<size_t> yorder(n);
  std::iota(yorder.begin(), yorder.end(), 0);
  TieStats ty = tie_stats(
      n, [&](size_t a, size_t b) { return y[a] < y[b]; },
      [&](size_t a, size_t b) { return y[a] == y[b]; }, yorder);

  std::vector<double> yseq(n);
  for (size_t i = 0; i < n; ++i) yseq[i] = y[order[i]];
  std::vector<double> buf(n);
  uint64_t discordant = count_inversions(yseq, buf, 0, n);

  double n1 = tx.sum_t2;
  double n2 = ty.sum_t2;
  double cd = n0 - n1 - n2 + n3;  // concordant + discordant
  double s = cd - 2.0 * static_cast<double>(discordant);

  CorrelationCell cell;
  double denom = std::sqrt((n0 - n1) * (n0 - n2));
  cell.tau = s / denom;

  double nn = static_cast<double>(n);
  double v0 = nn * (nn - 1) * (2 * nn + 5);
  double var_s = (v0 - tx.sum_v - ty.sum_v) / 18.0 +
                 tx.sum_t12 * ty.sum_t12 / (2.0 * nn * (nn - 1));
  if (n > 2) var_s += tx.sum_t123 * ty.sum_t123 / (9.0 * nn * (nn - 1) * (nn - 2));
  if (var_s <= 0) {
    cell.p_value = 1.0;
  } else {
    double z = s / std::sqrt(var_s);
    cell.p_value = 2.0 * numeric::normal_sf(std::fabs(z));
    if (cell.p_value > 1.0) cell.p_value = 1.0;
  }
  double a = std::fabs(cell.tau);
  cell.effect = a >= 0.50 ? EffectSize::high
              : a >= 0.30 ? EffectSize::medium
                          : EffectSize::negligible;
  cell.significant = cell.p_value < 0.05;
  return cell;
}

std::vector<std::vector<CorrelationCell>> correlation_matrix(const DataTable& table) {
  const size_t m = table.n_cols();
  std::vector<std::vector<CorrelationCell>> cells(m, std::vector<CorrelationCell>(m));
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      if (i == j) {
        cells[i][j].tau = 1.0;
        cells[i][j].p_value = 0.0;
        cells[i][j].effect = EffectSize::high;
        cells[i][j].significant = true;
      } else if (j > i) {
        cells[i][j] = kendall_tau_b(table.column(i), table.column(j));
      } else {
        cells[i][j] = cells[j][i];
      }
    }
  }
  return cells;
}

double rmse(const std::vector<double>& predicted, const std::vector<double>& actual) {
  if (predicted.size() != actual.size() || predicted.empty())
    throw std::runtime_error("rmse: length mismatch or empty input");
  double ss = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    double d = predicted[i] - actual[i];
    ss += d * d;
  }
  return std::sqrt(ss / predicted.size());
}

std::vector<double> solve_least_squares(const std::vector<std::vector<double>>& design_columns,
                                        const std::vector<double>& response,
                                        const std::vector<std::string>& column_names) {
  const size_t p = design_columns.size();
  const size_t n = response.size();
  if (p == 0 || n < p) throw std::runtime_error("least squares: underdetermined system");

  // Householder QR, column-major working copy of the design.
  std::vector<std::vector<double>> a(p);
  for (size_t c = 0; c < p; ++c) {
    if (design_columns[c].size() != n)
      throw std::runtime_error("least squares: ragged design matrix");
    a[c] = design_columns[c];
  }
  std::vector<double> qty = response;

  std::vector<double> diag(p);
  for (size_t k = 0; k < p; ++k) {
    double norm = 0;
    for (size_t i = k; i < n; ++i) norm += a[k][i] * a[k][i];
    norm = std::sqrt(norm);
    if (a[k][k] < 0) norm = -norm;  // keep v[k] = 1 + |x_k|/||x|| well away from 0
    diag[k] = -norm;
    if (norm == 0) continue;
    for (size_t i = k; i < n; ++i) a[k][i] /= norm;
    a[k][k] += 1.0;
    for (size_t c = k + 1; c < p; ++c) {
      double s = 0;
      for (size_t i = k; i < n; ++i) s += a[k][i] * a[c][i];
      s = -s / a[k][k];
      for (size_t i = k; i < n; ++i) a[c][i] += s * a[k][i];
    }
    double s = 0;
    for (size_t i = k; i < n; ++i) s += a[k][i] * qty[i];
    s = -s / a[k][k];
    for (size_t i = k; i < n; ++i) qty[i] += s * a[k][i];
  }

  double max_diag = 0;
  for (size_t k = 0; k < p; ++k) max_diag = std::max(max_diag, std::fabs(diag[k]));
  for (size_t k = 0; k < p; ++k) {
    if (std::fabs(diag[k]) < 1e-10 * max_diag) {
      std::string name = k < column_names.size() ? column_names[k] : std::to_string(k);
      throw std::runtime_error("least squares: collinear column '" + name + "'");
    }
  }

  std::vector<double> beta(p);
  for (size_t k = p; k-- > 0;) {
    double s = qty[k];
    for (size_t c = k + 1; c < p; ++c) s -= beta[c] * a[c][k];
    beta[k] = s / diag[k];
  }
  return beta;
}

OlsReport ols_fit(const DataTable& predictors, const std::vector<double>& response) {
  const size_t n = response.size();
  const size_t k = predictors.n_cols();
  if (predictors.n_rows() != n) throw std::runtime_error("ols: row count mismatch");
  if (n <= k + 1) throw std::runtime_error("ols: need more rows than coefficients");

  std::vector<std::vector<double>> design;
  std::vector<std::string> names;
  design.emplace_back(n, 1.0);
  names.push_back("(intercept)");
  for (size_t c = 0; c < k; ++c) {
    design.push_back(predictors.column(c));
    names.push_back(predictors.names()[c]);
  }
  OlsReport report;
  report.coefficients = solve_least_squares(design, response, names);
  report.predictor_names = predictors.names();
  report.df_model = static_cast<int>(k);
  report.df_residual = static_cast<int>(n - k - 1);

  double mean = std::accumulate(response.begin(), response.end(), 0.0) / n;
  double sst = 0, sse = 0;
  for (size_t i = 0; i < n; ++i) {
    double fit = report.coefficients[0];
    for (size_t c = 0; c < k; ++c) fit += report.coefficients[c + 1] * predictors.column(c)[i];
    double r = response[i] - fit;
    sse += r * r;
    double d = response[i] - mean;
    sst += d * d;
  }
  report.r_squared = sst > 0 ? 1.0 - sse / sst : 1.0;
  report.residual_variance = sse / report.df_residual;
  if (sse > 0 && sst > sse) {
    report.f_statistic = (report.r_squared / report.df_model) /
                         ((1.0 - report.r_squared) / report.df_residual);
    report.p_value = numeric::f_sf(report.f_statistic, report.df_model, report.df_residual);
  } else if (sse == 0) {
    report.f_statistic = std::numeric_limits<double>::max();
    report.p_value = 0.0;
  } else {
    report.f_statistic = 0.0;
    report.p_value = 1.0;
  }
  return report;
}

std::vector<double> ols_predict(const OlsReport& model, const DataTable& table) {
  std::vector<const std::vector<double>*> cols;
  for (const auto& name : model.predictor_names) cols.push_back(&table.column(name));
  std::vector<double> out(table.n_rows());
  for (size_t r = 0; r < table.n_rows(); ++r) {
    double v = model.coefficients[0];
    for (size_t c = 0; c < cols.size(); ++c) v += model.coefficients[c + 1] * (*cols[c])[r];
    out[r] = v;
  }
  return out;
}

KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups,
                             const std::vector<std::string>& labels) {
  const size_t k = groups.size();
  if (k < 2) throw std::runtime_error("kruskal_wallis: need at least 2 groups");
  if (labels.size() != k) throw std::runtime_error("kruskal_wallis: label count mismatch");
  size_t total = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw std::runtime_error("kruskal_wallis: empty group");
    total += g.size();
  }
  const double n = static_cast<double>(total);

  struct Obs {
    double value;
    size_t group;
  };
  std::vector<Obs> pooled;
  pooled.reserve(total);
  for (size_t g = 0; g < k; ++g)
    for (double v : groups[g]) pooled.push_back({v, g});
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const Obs& a, const Obs& b) { return a.value < b.value; });

  // Mid-ranks plus the tie term sum(t^3 - t).
  std::vector<double> rank_sum(k, 0.0);
  double tie_term = 0;
  size_t i = 0;
  while (i < total) {
    size_t j = i + 1;
    while (j < total && pooled[j].value == pooled[i].value) ++j;
    double t = static_cast<double>(j - i);
    double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t m = i; m < j; ++m) rank_sum[pooled[m].group] += mid_rank;
    tie_term += t * t * t - t;
    i = j;
  }

  KruskalResult result;
  result.df = static_cast<int>(k - 1);
  double correction = 1.0 - tie_term / (n * n * n - n);
  if (correction <= 0) {
    // All pooled values identical.
    result.h_statistic = 0;
    result.p_value = 1.0;
  } else {
    double h = 0;
    for (size_t g = 0; g < k; ++g) h += rank_sum[g] * rank_sum[g] / groups[g].size();
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1);
    result.h_statistic = h / correction;
    result.p_value = numeric::chi_squared_sf(result.h_statistic, result.df);
  }

  const double n_pairs = static_cast<double>(k * (k - 1) / 2);
  double dunn_var_base = n * (n + 1) / 12.0 - tie_term / (12.0 * (n - 1));
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = a + 1; b < k; ++b) {
      PairwiseComparison pc;
      pc.a = labels[a];
      pc.b = labels[b];
      double mean_a = rank_sum[a] / groups[a].size();
      double mean_b = rank_sum[b] / groups[b].size();
      double se = std::sqrt(dunn_var_base * (1.0 / groups[a].size() + 1.0 / groups[b].size()));
      if (se > 0 && mean_a != mean_b) {
        pc.z = (mean_a - mean_b) / se;
        double raw = 2.0 * numeric::normal_sf(std::fabs(pc.z));
        pc.p_adj = std::min(1.0, raw * n_pairs);
      } else {
        pc.z = 0.0;
        pc.p_adj = 1.0;
      }
      result.pairwise.push_back(pc);
    }
  }
  return result;
}

}  // namespace regbench::stats
