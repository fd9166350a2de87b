#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "feature_view.hpp"
#include "regbench/learners.hpp"

namespace regbench::learners {

std::string tag_name(LearnerTag tag) {
  switch (tag) {
    case LearnerTag::linear: return "linear";
    case LearnerTag::glm: return "glm";
    case LearnerTag::cart: return "cart";
    case LearnerTag::earth: return "earth";
    case LearnerTag::gbm: return "gbm";
    case LearnerTag::xgb: return "xgb";
  }
  return "linear";
}

LearnerTag tag_from_name(const std::string& name) {
  if (name == "linear") return LearnerTag::linear;
  if (name == "glm") return LearnerTag::glm;
  if (name == "cart") return LearnerTag::cart;
  if (name == "earth") return LearnerTag::earth;
  if (name == "gbm") return LearnerTag::gbm;
  if (name == "xgb") return LearnerTag::xgb;
  throw std::runtime_error("unknown learner '" + name + "'");
}

double LearnerConfig::param(const std::string& name, double fallback) const {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

int LearnerConfig::iparam(const std::string& name, int fallback) const {
  return static_cast<int>(param(name, fallback));
}

void LearnerConfig::validate() const {
  auto check = [&](const std::string& name, double lo, double hi, bool lo_open = false) {
    auto it = params.find(name);
    if (it == params.end()) return;
    double v = it->second;
    bool ok = (lo_open ? v > lo : v >= lo) && v <= hi;
    if (!ok)
      throw std::runtime_error("config: parameter '" + name + "' = " +
                               std::to_string(v) + " out of range for " + tag_name(learner));
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  check("num_trees", 1, inf);
  check("interaction_depth", 1, inf);
  check("max_depth", 1, inf);
  check("depth", 1, inf);
  check("shrinkage", 0, 1, true);
  check("eta", 0, 1, true);
  check("min_obs", 1, inf);
  check("min_improve", 0, inf);
  check("bag_fraction", 0, 1, true);
  check("subsample", 0, 1, true);
  check("lambda", 0, inf);
  check("gamma", 0, inf);
  check("min_child_weight", 0, inf);
  check("max_terms", 3, inf);
  check("max_degree", 1, inf);
  check("gcv_penalty", 0, inf);
}

FittedModel fit_linear(const DataTable& table, const std::string& response) {
  auto view = FeatureView::training(table, response);
  std::vector<std::vector<double>> cols;
  for (const auto* c : view.columns) cols.push_back(*c);
  DataTable predictors(view.names, std::move(cols));
  stats::OlsReport ols = stats::ols_fit(predictors, table.column(response));

  FittedModel model;
  model.learner = LearnerTag::linear;
  model.config.learner = LearnerTag::linear;
  model.feature_names = view.names;
  model.structure = LinearModel{ols.coefficients};
  model.iterations = 1;
  return model;
}

namespace {

std::vector<double> weighted_ls(const FeatureView& view, const std::vector<double>& z,
                                const std::vector<double>& w) {
  const size_t n = z.size();
  std::vector<std::vector<double>> design;
  std::vector<std::string> names;
  design.emplace_back(n);
  names.push_back("(intercept)");
  for (size_t i = 0; i < n; ++i) design[0][i] = std::sqrt(w[i]);
  for (size_t c = 0; c < view.columns.size(); ++c) {
    design.emplace_back(n);
    names.push_back(view.names[c]);
    for (size_t i = 0; i < n; ++i) design[c + 1][i] = (*view.columns[c])[i] * std::sqrt(w[i]);
  }
  std::vector<double> rhs(n);
  for (size_t i = 0; i < n; ++i) rhs[i] = z[i] * std::sqrt(w[i]);
  return stats::solve_least_squares(design, rhs, names);
}

double poisson_deviance(const std::vector<double>& y, const std::vector<double>& mu) {
  double dev = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 0) dev += y[i] * std::log(y[i] / mu[i]) - (y[i] - mu[i]);
    else dev += mu[i];
  }
  return 2.0 * dev;
}

}  // namespace

FittedModel fit_glm(const DataTable& table, const std::string& response,
                    const std::string& family) {
  auto view = FeatureView::training(table, response);
  const std::vector<double>& y = table.column(response);
  const size_t n = y.size();
  const size_t p = view.columns.size() + 1;

  FittedModel model;
  model.learner = LearnerTag::glm;
  model.config.learner = LearnerTag::glm;
  model.feature_names = view.names;

  if (family == "gaussian-identity") {
    // Identity link with unit weights: IRLS converges in the first step and
    // coincides with OLS.
    std::vector<double> w(n, 1.0);
    GlmModel glm{weighted_ls(view, y, w), family, 1};
    model.structure = std::move(glm);
    model.iterations = 1;
    return model;
  }
  if (family != "poisson-log")
    throw std::runtime_error("glm: unknown family '" + family + "'");
  for (double v : y)
    if (v < 0) throw std::runtime_error("glm: poisson-log requires nonnegative response");

  std::vector<double> mu(n), eta(n);
  for (size_t i = 0; i < n; ++i) {
    mu[i] = y[i] + 0.5;
    eta[i] = std::log(mu[i]);
  }
  std::vector<double> beta(p, 0.0);
  double prev_dev = poisson_deviance(y, mu);
  int rising = 0;
  int iter = 0;
  for (; iter < 50; ++iter) {
    std::vector<double> w(n), z(n);
    for (size_t i = 0; i < n; ++i) {
      double m = std::max(mu[i], 1e-10);
      w[i] = m;
      z[i] = eta[i] + (y[i] - m) / m;
    }
    std::vector<double> next = weighted_ls(view, z, w);
    double max_change = 0;
    for (size_t j = 0; j < p; ++j) max_change = std::max(max_change, std::fabs(next[j] - beta[j]));
    beta = next;
    for (size_t i = 0; i < n; ++i) {
      double e = beta[0];
      for (size_t c = 0; c + 1 < p; ++c) e += beta[c + 1] * (*view.columns[c])[i];
      eta[i] = e;
      mu[i] = std::exp(std::min(e, 700.0));
    }
    double dev = poisson_deviance(y, mu);
    rising = dev > prev_dev ? rising + 1 : 0;
    if (rising >= 3) throw std::runtime_error("glm: IRLS diverged (deviance rising)");
    prev_dev = dev;
    if (max_change < 1e-8) {
      ++iter;
      break;
    }
  }
  model.structure = GlmModel{std::move(beta), family, iter};
  model.iterations = iter;
  return model;
}

FittedModel fit(const DataTable& table, const std::string& response,
                const LearnerConfig& config) {
  config.validate();
  switch (config.learner) {
    case LearnerTag::linear:
      return fit_linear(table, response);
    case LearnerTag::glm: {
      std::string family =
          config.param("poisson", 0) != 0 ? "poisson-log" : "gaussian-identity";
      FittedModel m = fit_glm(table, response, family);
      m.config = config;
      return m;
    }
    case LearnerTag::cart: {
      FittedModel m = fit_cart(table, response, config.iparam("max_depth", 6),
                               config.iparam("min_obs", 5), config.param("min_improve", 0));
      m.config = config;
      return m;
    }
    case LearnerTag::earth: {
      FittedModel m = fit_mars(table, response, config.iparam("max_terms", 21),
                               config.iparam("max_degree", 1), config.param("gcv_penalty", 3));
      m.config = config;
      return m;
    }
    case LearnerTag::gbm: {
      FittedModel m = fit_gbm(table, response, config.iparam("num_trees", 100),
                              config.iparam("interaction_depth", 6),
                              config.param("shrinkage", 0.1), config.iparam("min_obs", 5),
                              config.param("bag_fraction", 0.5), config.seed);
      m.config = config;
      return m;
    }
    case LearnerTag::xgb: {
      FittedModel m = fit_xgb(table, response, config.iparam("num_trees", 100),
                              config.iparam("max_depth", 6), config.param("eta", 0.1),
                              config.param("lambda", 1.0), config.param("gamma", 0.0),
                              config.param("min_child_weight", 1.0),
                              config.param("subsample", 0.5), config.seed);
      m.config = config;
      return m;
    }
  }
  throw std::runtime_error("fit: unknown learner");
}

std::vector<double> predict(const FittedModel& model, const DataTable& table) {
  auto view = FeatureView::bind(table, model.feature_names);
  const size_t n = table.n_rows();
  std::vector<double> out(n, 0.0);

  if (const auto* lin = std::get_if<LinearModel>(&model.structure)) {
    for (size_t r = 0; r < n; ++r) {
      double v = lin->coef[0];
      for (size_t c = 0; c < view.columns.size(); ++c)
        v += lin->coef[c + 1] * (*view.columns[c])[r];
      out[r] = v;
    }
  } else if (const auto* glm = std::get_if<GlmModel>(&model.structure)) {
    for (size_t r = 0; r < n; ++r) {
      double e = glm->coef[0];
      for (size_t c = 0; c < view.columns.size(); ++c)
        e += glm->coef[c + 1] * (*view.columns[c])[r];
      out[r] = glm->family == "poisson-log" ? std::exp(e) : e;
    }
  } else if (const auto* tree = std::get_if<Tree>(&model.structure)) {
    for (size_t r = 0; r < n; ++r) out[r] = tree->evaluate(view.columns, r);
  } else if (const auto* mars = std::get_if<MarsModel>(&model.structure)) {
    for (size_t r = 0; r < n; ++r) {
      double v = 0;
      for (size_t b = 0; b < mars->bases.size(); ++b)
        v += mars->coef[b] * evaluate_mars_basis(mars->bases[b], view.columns, r);
      out[r] = v;
    }
  } else if (const auto* ens = std::get_if<Ensemble>(&model.structure)) {
    for (size_t r = 0; r < n; ++r) {
      double v = ens->base;
      for (const auto& t : ens->trees) v += ens->shrinkage * t.evaluate(view.columns, r);
      out[r] = v;
    }
  }
  return out;
}

}  // namespace regbench::learners
