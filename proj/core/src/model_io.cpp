#include "regbench/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace regbench::io {

namespace {
constexpr int kSchemaVersion = 1;
}

json config_to_json(const learners::LearnerConfig& config) {
  json j;
  j["learner"] = learners::tag_name(config.learner);
  j["params"] = json::object();
  for (const auto& [name, value] : config.params) j["params"][name] = value;
  j["seed"] = config.seed;
  return j;
}

learners::LearnerConfig config_from_json(const json& j) {
  learners::LearnerConfig config;
  config.learner = learners::tag_from_name(j.at("learner").get<std::string>());
  for (const auto& [name, value] : j.at("params").items())
    config.params[name] = value.get<double>();
  config.seed = j.value("seed", 0ULL);
  config.validate();
  return config;
}

namespace {

json tree_to_json(const learners::Tree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    json node;
    if (n.feature >= 0) {
      node["feature"] = n.feature;
      node["threshold"] = n.threshold;
      node["left"] = n.left;
      node["right"] = n.right;
    } else {
      node["value"] = n.value;
      node["count"] = n.count;
    }
    nodes.push_back(std::move(node));
  }
  return nodes;
}

learners::Tree tree_from_json(const json& j) {
  learners::Tree tree;
  for (const auto& node : j) {
    learners::TreeNode n;
    if (node.contains("feature")) {
      n.feature = node.at("feature").get<int>();
      n.threshold = node.at("threshold").get<double>();
      n.left = node.at("left").get<int>();
      n.right = node.at("right").get<int>();
    } else {
      n.value = node.at("value").get<double>();
      n.count = node.at("count").get<size_t>();
    }
    tree.nodes.push_back(n);
  }
  return tree;
}

}  // namespace

json model_to_json(const learners::FittedModel& model) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["learner"] = learners::tag_name(model.learner);
  j["params"] = json::object();
  for (const auto& [name, value] : model.config.params) j["params"][name] = value;
  j["seed"] = model.config.seed;
  j["features"] = model.feature_names;
  j["iterations"] = model.iterations;
  if (!model.training_rmse_trace.empty()) j["training_rmse_trace"] = model.training_rmse_trace;

  json structure;
  if (const auto* lin = std::get_if<learners::LinearModel>(&model.structure)) {
    structure["kind"] = "linear";
    structure["coefficients"] = lin->coef;
  } else if (const auto* glm = std::get_if<learners::GlmModel>(&model.structure)) {
    structure["kind"] = "glm";
    structure["coefficients"] = glm->coef;
    structure["family"] = glm->family;
    structure["irls_iterations"] = glm->iterations;
  } else if (const auto* tree = std::get_if<learners::Tree>(&model.structure)) {
    structure["kind"] = "tree";
    structure["nodes"] = tree_to_json(*tree);
  } else if (const auto* mars = std::get_if<learners::MarsModel>(&model.structure)) {
    structure["kind"] = "mars";
    structure["coefficients"] = mars->coef;
    json bases = json::array();
    for (const auto& basis : mars->bases) {
      json factors = json::array();
      for (const auto& f : basis.factors)
        factors.push_back({{"feature", f.feature}, {"knot", f.knot}, {"direction", f.direction}});
      bases.push_back(std::move(factors));
    }
    structure["bases"] = std::move(bases);
  } else if (const auto* ens = std::get_if<learners::Ensemble>(&model.structure)) {
    structure["kind"] = "ensemble";
    structure["base"] = ens->base;
    structure["shrinkage"] = ens->shrinkage;
    json trees = json::array();
    for (const auto& t : ens->trees) trees.push_back(tree_to_json(t));
    structure["trees"] = std::move(trees);
  }
  j["structure"] = std::move(structure);
  return j;
}

learners::FittedModel model_from_json(const json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion)
    throw std::runtime_error("model: unsupported schema version");
  learners::FittedModel model;
  model.learner = learners::tag_from_name(j.at("learner").get<std::string>());
  model.config.learner = model.learner;
  for (const auto& [name, value] : j.at("params").items())
    model.config.params[name] = value.get<double>();
  model.config.seed = j.value("seed", 0ULL);
  model.feature_names = j.at("features").get<std::vector<std::string>>();
  model.iterations = j.value("iterations", 0);
  if (j.contains("training_rmse_trace"))
    model.training_rmse_trace = j.at("training_rmse_trace").get<std::vector<double>>();

  const json& s = j.at("structure");
  std::string kind = s.at("kind").get<std::string>();
  if (kind == "linear") {
    model.structure = learners::LinearModel{s.at("coefficients").get<std::vector<double>>()};
  } else if (kind == "glm") {
    model.structure = learners::GlmModel{s.at("coefficients").get<std::vector<double>>(),
                                         s.at("family").get<std::string>(),
                                         s.value("irls_iterations", 0)};
  } else if (kind == "tree") {
    model.structure = tree_from_json(s.at("nodes"));
  } else if (kind == "mars") {
    learners::MarsModel mars;
    mars.coef = s.at("coefficients").get<std::vector<double>>();
    for (const auto& basis : s.at("bases")) {
      learners::MarsBasis b;
      for (const auto& f : basis)
        b.factors.push_back({f.at("feature").get<int>(), f.at("knot").get<double>(),
                             f.at("direction").get<int>()});
      mars.bases.push_back(std::move(b));
    }
    model.structure = std::move(mars);
  } else if (kind == "ensemble") {
    learners::Ensemble ens;
    ens.base = s.at("base").get<double>();
    ens.shrinkage = s.at("shrinkage").get<double>();
    for (const auto& t : s.at("trees")) ens.trees.push_back(tree_from_json(t));
    model.structure = std::move(ens);
  } else {
    throw std::runtime_error("model: unknown structure kind '" + kind + "'");
  }
  return model;
}

json recipe_to_json(const atlm::TransformRecipe& recipe) {
  json cols = json::array();
  for (const auto& ct : recipe.columns) {
    cols.push_back({{"name", ct.name},
                    {"transform", atlm::transform_name(ct.transform)},
                    {"skew_before", ct.skew_before},
                    {"skew_after", ct.skew_after},
                    {"threshold", recipe.threshold}});
  }
  json j;
  j["threshold"] = recipe.threshold;
  j["applied"] = recipe.applied;
  j["columns"] = std::move(cols);
  return j;
}

atlm::TransformRecipe recipe_from_json(const json& j) {
  atlm::TransformRecipe recipe;
  recipe.threshold = j.at("threshold").get<double>();
  recipe.applied = j.value("applied", false);
  for (const auto& col : j.at("columns")) {
    atlm::ColumnTransform ct;
    ct.name = col.at("name").get<std::string>();
    ct.transform = atlm::transform_from_name(col.at("transform").get<std::string>());
    ct.skew_before = col.at("skew_before").get<double>();
    ct.skew_after = col.at("skew_after").get<double>();
    recipe.columns.push_back(std::move(ct));
  }
  return recipe;
}

json ols_report_to_json(const stats::OlsReport& report) {
  json j;
  j["coefficients"] = report.coefficients;
  j["predictors"] = report.predictor_names;
  j["r_squared"] = report.r_squared;
  j["f_statistic"] = report.f_statistic;
  j["df_model"] = report.df_model;
  j["df_residual"] = report.df_residual;
  j["p_value"] = report.p_value;
  j["residual_variance"] = report.residual_variance;
  return j;
}

json baseline_to_json(const atlm::BaselineReport& report) {
  json j;
  j["response"] = report.response_name;
  j["recipe"] = recipe_to_json(report.recipe);
  j["ols"] = ols_report_to_json(report.ols);
  return j;
}

json kruskal_to_json(const stats::KruskalResult& result) {
  json pairwise = json::array();
  for (const auto& pc : result.pairwise)
    pairwise.push_back({{"a", pc.a}, {"b", pc.b}, {"z", pc.z}, {"p_adj", pc.p_adj}});
  json j;
  j["h"] = result.h_statistic;
  j["df"] = result.df;
  j["p"] = result.p_value;
  j["pairwise"] = std::move(pairwise);
  return j;
}

json correlation_matrix_to_json(const std::vector<std::string>& names,
                                const std::vector<std::vector<stats::CorrelationCell>>& cells) {
  json matrix = json::array();
  for (size_t i = 0; i < cells.size(); ++i) {
    json row = json::array();
    for (size_t k = 0; k < cells[i].size(); ++k) {
      const auto& cell = cells[i][k];
      row.push_back({{"tau", cell.tau},
                     {"p", cell.p_value},
                     {"effect", stats::effect_name(cell.effect)},
                     {"significant", cell.significant}});
    }
    matrix.push_back(std::move(row));
  }
  json j;
  j["columns"] = names;
  j["matrix"] = std::move(matrix);
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(hex);
}

}  // namespace regbench::io
