#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "feature_view.hpp"
#include "regbench/learners.hpp"

namespace regbench::learners {

double evaluate_mars_basis(const MarsBasis& basis,
                           const std::vector<const std::vector<double>*>& columns, size_t row) {
  double v = 1.0;
  for (const auto& factor : basis.factors) {
    double x = (*columns[factor.feature])[row];
    double h = factor.direction > 0 ? x - factor.knot : factor.knot - x;
    if (h <= 0) return 0.0;
    v *= h;
  }
  return v;
}

double mars_gcv(double sse, size_t n, size_t n_terms, double penalty) {
  double c = static_cast<double>(n_terms) + penalty * (static_cast<double>(n_terms) - 1) / 2.0;
  if (c >= static_cast<double>(n)) return std::numeric_limits<double>::infinity();
  double shrink = 1.0 - c / static_cast<double>(n);
  return (sse / n) / (shrink * shrink);
}

namespace {

constexpr size_t kMaxKnotsPerFeature = 128;
constexpr double kForwardMinRelImprove = 1e-4;

struct Candidate {
  size_t parent;
  int feature;
  double knot;
  double reduction;
};

struct Workspace {
  const std::vector<const std::vector<double>*>& columns;
  const std::vector<double>& y;
  size_t n;

  std::vector<MarsBasis> bases;
  std::vector<std::vector<double>> basis_values;

  void add_basis(MarsBasis basis) {
    std::vector<double> vals(n);
    for (size_t i = 0; i < n; ++i) vals[i] = evaluate_mars_basis(basis, columns, i);
    bases.push_back(std::move(basis));
    basis_values.push_back(std::move(vals));
  }

  // OLS on the selected bases; returns false on a collinear subset.
  bool refit(const std::vector<size_t>& selected, std::vector<double>& coef, double& sse) const {
    std::vector<std::vector<double>> design;
    std::vector<std::string> names;
    for (size_t idx : selected) {
      design.push_back(basis_values[idx]);
      names.push_back("basis" + std::to_string(idx));
    }
    try {
      coef = stats::solve_least_squares(design, y, names);
    } catch (const std::exception&) {
      return false;
    }
    sse = 0;
    for (size_t i = 0; i < n; ++i) {
      double fit = 0;
      for (size_t c = 0; c < selected.size(); ++c) fit += coef[c] * design[c][i];
      double r = y[i] - fit;
      sse += r * r;
    }
    return true;
  }
};

// SSE drop from regressing the residual on {1, parent*h+, parent*h-};
// solved through 3x3 normal equations, NaN when degenerate.
double pair_reduction(const std::vector<double>& residual, const std::vector<double>& parent_vals,
                      const std::vector<double>& x, double knot) {
  const size_t n = residual.size();
  double m[3][3] = {};
  double rhs[3] = {};
  for (size_t i = 0; i < n; ++i) {
    double b = parent_vals[i];
    double up = b * std::max(0.0, x[i] - knot);
    double um = b * std::max(0.0, knot - x[i]);
    double cols[3] = {1.0, up, um};
    for (int a = 0; a < 3; ++a) {
      for (int c = a; c < 3; ++c) m[a][c] += cols[a] * cols[c];
      rhs[a] += cols[a] * residual[i];
    }
  }
  for (int a = 1; a < 3; ++a)
    for (int c = 0; c < a; ++c) m[a][c] = m[c][a];
  double rhs0[3] = {rhs[0], rhs[1], rhs[2]};

  // Gaussian elimination with partial pivoting.
  double scale = std::max({m[0][0], m[1][1], m[2][2]});
  int perm[3] = {0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    int piv = k;
    for (int r = k + 1; r < 3; ++r)
      if (std::fabs(m[perm[r]][k]) > std::fabs(m[perm[piv]][k])) piv = r;
    std::swap(perm[k], perm[piv]);
    double d = m[perm[k]][k];
    if (std::fabs(d) < 1e-12 * scale) return std::numeric_limits<double>::quiet_NaN();
    for (int r = k + 1; r < 3; ++r) {
      double factor = m[perm[r]][k] / d;
      for (int c = k; c < 3; ++c) m[perm[r]][c] -= factor * m[perm[k]][c];
      rhs[perm[r]] -= factor * rhs[perm[k]];
    }
  }
  double sol[3];
  for (int k = 2; k >= 0; --k) {
    double s = rhs[perm[k]];
    for (int c = k + 1; c < 3; ++c) s -= m[perm[k]][c] * sol[c];
    sol[k] = s / m[perm[k]][k];
  }
  // Projection identity: drop in SSE equals beta' X'r.
  double reduction = 0;
  for (int k = 0; k < 3; ++k) reduction += sol[k] * rhs0[k];
  return reduction;
}

}  // namespace

FittedModel fit_mars(const DataTable& table, const std::string& response, int max_terms,
                     int max_degree, double gcv_penalty) {
  if (max_terms < 3 || max_degree < 1 || gcv_penalty < 0)
    throw std::runtime_error("mars: invalid parameters");
  auto view = FeatureView::training(table, response);
  const std::vector<double>& y = table.column(response);
  const size_t n = y.size();
  const size_t d = view.columns.size();

  Workspace ws{view.columns, y, n, {}, {}};
  ws.add_basis(MarsBasis{});  // constant term

  std::vector<size_t> selected = {0};
  std::vector<double> coef;
  double sse = 0;
  ws.refit(selected, coef, sse);

  // Forward pass: mirrored hinge pairs added greedily by residual SSE drop.
  while (static_cast<int>(ws.bases.size()) + 2 <= max_terms && sse > 1e-12) {
    std::vector<double> residual(n);
    for (size_t i = 0; i < n; ++i) {
      double fit = 0;
      for (size_t c = 0; c < selected.size(); ++c)
        fit += coef[c] * ws.basis_values[selected[c]][i];
      residual[i] = y[i] - fit;
    }

    std::vector<Candidate> candidates;
    for (size_t b = 0; b < ws.bases.size(); ++b) {
      if (static_cast<int>(ws.bases[b].factors.size()) >= max_degree) continue;
      for (size_t f = 0; f < d; ++f) {
        bool used = false;
        for (const auto& factor : ws.bases[b].factors)
          if (factor.feature == static_cast<int>(f)) used = true;
        if (used) continue;

        // Knots at distinct observed values inside the parent's support,
        // endpoints excluded, quantile-thinned past the cap.
        std::vector<double> values;
        for (size_t i = 0; i < n; ++i)
          if (ws.basis_values[b][i] > 0) values.push_back((*view.columns[f])[i]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        if (values.size() < 3) continue;
        std::vector<double> knots;
        size_t interior = values.size() - 2;
        if (interior <= kMaxKnotsPerFeature) {
          knots.assign(values.begin() + 1, values.end() - 1);
        } else {
          for (size_t k = 0; k < kMaxKnotsPerFeature; ++k) {
            size_t pos = 1 + (k * (interior - 1)) / (kMaxKnotsPerFeature - 1);
            knots.push_back(values[pos]);
          }
          knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
        }
        for (double t : knots) {
          double red = pair_reduction(residual, ws.basis_values[b], *view.columns[f], t);
          if (std::isnan(red) || red <= 0) continue;
          candidates.push_back({b, static_cast<int>(f), t, red});
        }
      }
    }
    if (candidates.empty()) break;
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.reduction > b.reduction; });

    bool accepted = false;
    for (const auto& cand : candidates) {
      MarsBasis plus = ws.bases[cand.parent];
      plus.factors.push_back({cand.feature, cand.knot, +1});
      MarsBasis minus = ws.bases[cand.parent];
      minus.factors.push_back({cand.feature, cand.knot, -1});
      ws.add_basis(std::move(plus));
      ws.add_basis(std::move(minus));
      std::vector<size_t> trial = selected;
      trial.push_back(ws.bases.size() - 2);
      trial.push_back(ws.bases.size() - 1);
      std::vector<double> trial_coef;
      double trial_sse = 0;
      if (!ws.refit(trial, trial_coef, trial_sse)) {
        ws.bases.resize(ws.bases.size() - 2);
        ws.basis_values.resize(ws.basis_values.size() - 2);
        continue;
      }
      double rel = sse > 0 ? (sse - trial_sse) / sse : 0;
      if (rel < kForwardMinRelImprove) {
        ws.bases.resize(ws.bases.size() - 2);
        ws.basis_values.resize(ws.basis_values.size() - 2);
        accepted = false;
      } else {
        selected = std::move(trial);
        coef = std::move(trial_coef);
        sse = trial_sse;
        accepted = true;
      }
      break;
    }
    if (!accepted) break;
  }

  // Backward pass: drop one basis at a time, keep the GCV-best subset seen.
  if (mars_gcv(sse, n, selected.size(), gcv_penalty) ==
      std::numeric_limits<double>::infinity()) {
    std::cerr << "warning: mars effective parameters exceed n; pruning forcibly\n";
  }
  std::vector<size_t> best_set = selected;
  double best_gcv = mars_gcv(sse, n, selected.size(), gcv_penalty);
  std::vector<size_t> current = selected;
  double current_sse = sse;
  while (current.size() > 1) {
    double step_best_gcv = std::numeric_limits<double>::infinity();
    std::vector<size_t> step_best_set;
    double step_best_sse = 0;
    for (size_t drop = 1; drop < current.size(); ++drop) {
      std::vector<size_t> trial;
      for (size_t c = 0; c < current.size(); ++c)
        if (c != drop) trial.push_back(current[c]);
      std::vector<double> trial_coef;
      double trial_sse = 0;
      if (!ws.refit(trial, trial_coef, trial_sse)) continue;
      double gcv = mars_gcv(trial_sse, n, trial.size(), gcv_penalty);
      if (gcv < step_best_gcv) {
        step_best_gcv = gcv;
        step_best_set = std::move(trial);
        step_best_sse = trial_sse;
      }
    }
    if (step_best_set.empty()) break;
    current = std::move(step_best_set);
    current_sse = step_best_sse;
    if (step_best_gcv <= best_gcv) {
      best_gcv = step_best_gcv;
      best_set = current;
    }
  }

  std::vector<double> final_coef;
  double final_sse = 0;
  if (!ws.refit(best_set, final_coef, final_sse))
    throw std::runtime_error("mars: final refit failed");

  MarsModel mars;
  for (size_t idx : best_set) mars.bases.push_back(ws.bases[idx]);
  mars.coef = std::move(final_coef);

  FittedModel model;
  model.learner = LearnerTag::earth;
  model.config.learner = LearnerTag::earth;
  model.config.params = {{"max_terms", double(max_terms)},
                         {"max_degree", double(max_degree)},
                         {"gcv_penalty", gcv_penalty}};
  model.feature_names = view.names;
  model.structure = std::move(mars);
  model.iterations = static_cast<int>(ws.bases.size());
  return model;
}

}  // namespace regbench::learners
