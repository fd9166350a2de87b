#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "regbench/learners.hpp"

namespace regbench::learners {

double Tree::evaluate(const std::vector<const std::vector<double>*>& columns, size_t row) const {
  if (nodes.empty()) return 0;
  int idx = 0;
  while (nodes[idx].feature >= 0) {
    const TreeNode& node = nodes[idx];
    idx = (*columns[node.feature])[row] < node.threshold ? node.left : node.right;
  }
  return nodes[idx].value;
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double score = 0;  // children SSE; lower is better
  std::vector<size_t> left_rows;
  std::vector<size_t> right_rows;
};

double node_sse(const std::vector<double>& targets, const std::vector<size_t>& rows) {
  double sum = 0, sumsq = 0;
  for (size_t r : rows) {
    sum += targets[r];
    sumsq += targets[r] * targets[r];
  }
  return sumsq - sum * sum / rows.size();
}

// Candidate thresholds are midpoints between consecutive distinct sorted
// values. Ties break to the lowest feature index, then the lowest threshold.
// Scores are accumulated in per-feature sorted order, so two candidates that
// induce the same partition can differ by rounding noise; scores within a
// relative 1e-9 of the node SSE count as tied, and the scan order then keeps
// the earliest candidate.
SplitChoice best_sse_split(const std::vector<const std::vector<double>*>& columns,
                           const std::vector<size_t>& rows, const std::vector<double>& targets,
                           size_t min_per_side) {
  SplitChoice best;
  const size_t n = rows.size();
  double total_sum = 0, total_sq = 0;
  for (size_t r : rows) {
    total_sum += targets[r];
    total_sq += targets[r] * targets[r];
  }
  std::vector<size_t> sorted;
  for (size_t f = 0; f < columns.size(); ++f) {
    const std::vector<double>& x = *columns[f];
    sorted = rows;
    std::sort(sorted.begin(), sorted.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
    double lsum = 0, lsq = 0;
    for (size_t i = 1; i < n; ++i) {
      double t = targets[sorted[i - 1]];
      lsum += t;
      lsq += t * t;
      if (x[sorted[i]] == x[sorted[i - 1]]) continue;
      if (i < min_per_side || n - i < min_per_side) continue;
      double rsum = total_sum - lsum;
      double rsq = total_sq - lsq;
      double score = (lsq - lsum * lsum / i) + (rsq - rsum * rsum / (n - i));
      double tie_eps = 1e-9 * std::max(1.0, total_sq - total_sum * total_sum / n);
      if (!best.found || score < best.score - tie_eps) {
        best.found = true;
        best.feature = static_cast<int>(f);
        best.threshold = x[sorted[i - 1]] / 2.0 + x[sorted[i]] / 2.0;
        best.score = score;
        best.left_rows.assign(sorted.begin(), sorted.begin() + i);
        best.right_rows.assign(sorted.begin() + i, sorted.end());
      }
    }
  }
  return best;
}

struct CartBuilder {
  const std::vector<const std::vector<double>*>& columns;
  const std::vector<double>& targets;
  const CartParams& params;
  Tree tree;

  int grow(const std::vector<size_t>& rows, int depth) {
    int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double sum = 0;
    for (size_t r : rows) sum += targets[r];
    double mean = sum / rows.size();

    if (depth < params.max_depth && rows.size() >= 2 * static_cast<size_t>(params.min_obs)) {
      double parent_sse = node_sse(targets, rows);
      auto split = best_sse_split(columns, rows, targets, params.min_obs);
      double improvement = split.found ? parent_sse - split.score : 0;
      if (split.found && improvement > 0 && improvement >= params.min_improve) {
        tree.nodes[idx].feature = split.feature;
        tree.nodes[idx].threshold = split.threshold;
        int left = grow(split.left_rows, depth + 1);
        int right = grow(split.right_rows, depth + 1);
        tree.nodes[idx].left = left;
        tree.nodes[idx].right = right;
        return idx;
      }
    }
    tree.nodes[idx].value = mean;
    tree.nodes[idx].count = rows.size();
    return idx;
  }
};

}  // namespace

Tree build_cart_tree(const std::vector<const std::vector<double>*>& columns,
                     const std::vector<double>& targets, const std::vector<size_t>& rows,
                     const CartParams& params) {
  if (rows.empty()) throw std::runtime_error("cart: empty training set");
  CartBuilder builder{columns, targets, params, {}};
  builder.grow(rows, 0);
  return std::move(builder.tree);
}

Tree build_xgb_tree(const std::vector<const std::vector<double>*>& columns,
                    const std::vector<double>& gradients, const std::vector<size_t>& rows,
                    const XgbParams& params) {
  if (rows.empty()) throw std::runtime_error("xgb: empty training set");

  struct Builder {
    const std::vector<const std::vector<double>*>& columns;
    const std::vector<double>& g;
    const XgbParams& params;
    Tree tree;

    static double leaf_objective(double gsum, double hsum, double lambda) {
      return gsum * gsum / (hsum + lambda);
    }

    int grow(const std::vector<size_t>& rows, int depth) {
      int idx = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();

      double gsum = 0;
      for (size_t r : rows) gsum += g[r];
      double hsum = static_cast<double>(rows.size());  // unit hessians

      if (depth < params.max_depth && rows.size() >= 2) {
        // gain = 0.5*(GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)) - gamma,
        // accepted only when positive.
        SplitChoice best;
        double best_gain = 0;
        std::vector<size_t> sorted;
        for (size_t f = 0; f < columns.size(); ++f) {
          const std::vector<double>& x = *columns[f];
          sorted = rows;
          std::sort(sorted.begin(), sorted.end(),
                    [&](size_t a, size_t b) { return x[a] < x[b]; });
          double gl = 0;
          for (size_t i = 1; i < rows.size(); ++i) {
            gl += g[sorted[i - 1]];
            if (x[sorted[i]] == x[sorted[i - 1]]) continue;
            double hl = static_cast<double>(i);
            double hr = hsum - hl;
            if (hl < params.min_child_weight || hr < params.min_child_weight) continue;
            double gr = gsum - gl;
            double gain = 0.5 * (leaf_objective(gl, hl, params.lambda) +
                                 leaf_objective(gr, hr, params.lambda) -
                                 leaf_objective(gsum, hsum, params.lambda)) -
                          params.gamma;
            // Same tie rule as the SSE search: near-equal gains keep the
            // earliest (lowest feature, lowest threshold) candidate.
            double tie_eps = 1e-9 * std::max(1.0, std::abs(best_gain));
            if (gain > 0 && (!best.found || gain > best_gain + tie_eps)) {
              best.found = true;
              best_gain = gain;
              best.feature = static_cast<int>(f);
              best.threshold = x[sorted[i - 1]] / 2.0 + x[sorted[i]] / 2.0;
              best.left_rows.assign(sorted.begin(), sorted.begin() + i);
              best.right_rows.assign(sorted.begin() + i, sorted.end());
            }
          }
        }
        if (best.found) {
          tree.nodes[idx].feature = best.feature;
          tree.nodes[idx].threshold = best.threshold;
          int left = grow(best.left_rows, depth + 1);
          int right = grow(best.right_rows, depth + 1);
          tree.nodes[idx].left = left;
          tree.nodes[idx].right = right;
          return idx;
        }
      }
      tree.nodes[idx].value = -gsum / (hsum + params.lambda);
      tree.nodes[idx].count = rows.size();
      return idx;
    }
  };

  Builder builder{columns, gradients, params, {}};
  builder.grow(rows, 0);
  return std::move(builder.tree);
}

}  // namespace regbench::learners
