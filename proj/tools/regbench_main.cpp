// regbench: batch pipeline from raw Q&A post exports to the cross-learner
// comparison report. Subcommands mirror the pipeline stages: extract, join,
// transform, correlate, baseline, tune, evaluate, report.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "regbench/atlm.hpp"
#include "regbench/csv.hpp"
#include "regbench/datatable.hpp"
#include "regbench/harness.hpp"
#include "regbench/ingest.hpp"
#include "regbench/learners.hpp"
#include "regbench/model_io.hpp"
#include "regbench/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace regbench;

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNumericError = 2;

// Thrown once inputs are valid; maps to exit code 2.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json make_meta(const json& resolved_config, const std::string& input_path) {
  json meta;
  meta["tool_version"] = kToolVersion;
  meta["config"] = resolved_config;
  meta["input_fingerprint"] = io::file_fingerprint(input_path);
  return meta;
}

std::vector<uint64_t> parse_seed_list(const std::string& text) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  return seeds;
}

template <typename Fn>
int run_numeric(Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const NumericFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericError;
  }
}

// ---- subcommand bodies ----

int cmd_extract(const std::string& posts_path, const std::string& out_dir,
                const std::string& features_path) {
  std::vector<ingest::PostRecord> posts;
  try {
    posts = ingest::load_posts_csv(posts_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return run_numeric([&] {
    auto result = ingest::extract_snippets(posts);
    fs::create_directories(out_dir);
    for (const auto& s : result.snippets) {
      std::ofstream out(fs::path(out_dir) / ingest::snippet_filename(s.snippet_id),
                        std::ios::binary);
      out << ingest::wrap_snippet(s.code, s.snippet_id);
    }
    write_csv(ingest::snippet_features_table(result.snippets), features_path);
    std::cerr << "extracted " << result.blocks_extracted << " blocks, kept "
              << result.snippets.size() << " multiline snippets ("
              << result.whitespace_only_dropped << " whitespace-only dropped)\n";
  });
}

int cmd_join(const std::string& features_path, const std::string& violations_path,
             const std::string& posts_path, const std::string& out_path) {
  try {
    auto posts = ingest::load_posts_csv(posts_path);
    auto features = load_csv(features_path);
    auto snippets = ingest::snippets_from_features_table(features);
    auto violations = ingest::load_violations_csv(violations_path);
    auto table = ingest::build_modeling_table(posts, snippets, violations);
    write_csv(table, out_path);
    std::cerr << "modeling table: " << table.n_rows() << " rows\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_transform(const std::string& in_path, const std::string& response, double threshold,
                  const std::string& out_path, const std::string& recipe_path) {
  DataTable table = [&] { return load_csv(in_path); }();
  table.column_index(response);
  return run_numeric([&] {
    atlm::TransformRecipe recipe = atlm::make_recipe(table, threshold);
    DataTable transformed = atlm::apply_recipe(table, recipe);
    write_csv(transformed, out_path);
    if (!recipe_path.empty()) {
      json j = io::recipe_to_json(recipe);
      j["meta"] = make_meta({{"in", in_path}, {"response", response}, {"threshold", threshold}},
                            in_path);
      io::write_json_file(recipe_path, j);
    }
  });
}

int cmd_correlate(const std::string& in_path, const std::string& out_path) {
  DataTable table = load_csv(in_path);
  return run_numeric([&] {
    auto cells = stats::correlation_matrix(table);
    json j = io::correlation_matrix_to_json(table.names(), cells);
    j["meta"] = make_meta({{"in", in_path}}, in_path);
    io::write_json_file(out_path, j);
  });
}

int cmd_baseline(const std::string& in_path, const std::string& response, double threshold,
                 const std::string& out_path) {
  DataTable table = load_csv(in_path);
  table.column_index(response);
  return run_numeric([&] {
    atlm::BaselineReport report = atlm::build_baseline(table, response, threshold);
    json j = io::baseline_to_json(report);
    j["meta"] = make_meta(
        {{"in", in_path}, {"response", response}, {"threshold", threshold}}, in_path);
    io::write_json_file(out_path, j);
  });
}

int cmd_tune(const std::string& in_path, const std::string& response,
             const std::string& learner_name, uint64_t seed, int folds,
             const std::string& out_path) {
  DataTable table = load_csv(in_path);
  table.column_index(response);
  learners::LearnerTag tag = learners::tag_from_name(learner_name);
  return run_numeric([&] {
    auto grid = harness::default_grid(tag);
    auto result = harness::tune(table, response, grid, seed, folds);
    json j = io::config_to_json(result.best);
    j["tuning"] = {{"shared_seed", seed},
                   {"folds", folds},
                   {"best_index", result.best_index},
                   {"best_mean_rmse", result.best_mean_rmse},
                   {"candidate_means", result.candidate_means}};
    j["meta"] = make_meta({{"in", in_path},
                           {"response", response},
                           {"learner", learner_name},
                           {"seed", seed},
                           {"folds", folds}},
                          in_path);
    io::write_json_file(out_path, j);
    std::cerr << learner_name << ": best mean CV RMSE " << result.best_mean_rmse << "\n";
  });
}

int cmd_evaluate(const std::string& in_path, const std::string& response,
                 const std::vector<std::string>& config_paths, int folds,
                 const std::string& seeds_text, const std::string& out_path) {
  DataTable table = load_csv(in_path);
  table.column_index(response);
  auto seeds = parse_seed_list(seeds_text);
  if (seeds.size() != 2) {
    std::cerr << "error: --seeds expects two comma-separated values\n";
    return kExitInputError;
  }
  std::vector<learners::LearnerConfig> configs;
  uint64_t shared_tuning_seed = 0;
  for (const auto& path : config_paths) {
    json j = io::read_json_file(path);
    configs.push_back(io::config_from_json(j));
    if (j.contains("tuning")) shared_tuning_seed = j["tuning"].value("shared_seed", 0ULL);
  }
  return run_numeric([&] {
    auto report = harness::evaluate(table, response, configs, folds, seeds);
    report.dataset_fingerprint = io::file_fingerprint(in_path);
    report.shared_tuning_seed = shared_tuning_seed;
    json j = harness::report_to_json(report);
    j["meta"] = make_meta({{"in", in_path},
                           {"response", response},
                           {"folds", folds},
                           {"seeds", seeds},
                           {"configs", config_paths}},
                          in_path);
    io::write_json_file(out_path, j);
    std::cerr << "ranking:";
    for (const auto& tag : report.ranking) std::cerr << " " << tag;
    std::cerr << "\n";
  });
}

std::string svg_boxplot(const harness::ComparisonReport& report) {
  // Five-number summary per learner, drawn on a fixed 640x400 canvas.
  struct Box {
    std::string label;
    double lo, q1, med, q3, hi;
  };
  auto quantile = [](std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * (v.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  std::vector<Box> boxes;
  double vmin = 1e300, vmax = -1e300;
  for (const auto& outcome : report.learners) {
    Box b;
    b.label = learners::tag_name(outcome.tag);
    b.lo = quantile(outcome.rmse_samples, 0.0);
    b.q1 = quantile(outcome.rmse_samples, 0.25);
    b.med = quantile(outcome.rmse_samples, 0.5);
    b.q3 = quantile(outcome.rmse_samples, 0.75);
    b.hi = quantile(outcome.rmse_samples, 1.0);
    vmin = std::min(vmin, b.lo);
    vmax = std::max(vmax, b.hi);
    boxes.push_back(b);
  }
  if (vmax <= vmin) vmax = vmin + 1;
  const double width = 640, height = 400, top = 30, bottom = 360, left = 60;
  auto ypix = [&](double v) {
    return bottom - (v - vmin) / (vmax - vmin) * (bottom - top);
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  svg << "<desc>per-fold RMSE samples (" << report.learners.front().rmse_samples.size()
      << " per learner), k=" << report.k << "</desc>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << bottom << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    double v = vmin + tick * (vmax - vmin) / 4;
    svg << "<text x=\"4\" y=\"" << ypix(v) + 4 << "\" font-size=\"11\">"
        << format_double(std::round(v * 100) / 100) << "</text>\n";
  }
  double slot = (width - left - 20) / boxes.size();
  for (size_t i = 0; i < boxes.size(); ++i) {
    const Box& b = boxes[i];
    double cx = left + slot * (i + 0.5);
    double half = slot * 0.25;
    svg << "<line x1=\"" << cx << "\" y1=\"" << ypix(b.lo) << "\" x2=\"" << cx << "\" y2=\""
        << ypix(b.hi) << "\" stroke=\"black\"/>\n";
    svg << "<rect x=\"" << cx - half << "\" y=\"" << ypix(b.q3) << "\" width=\"" << 2 * half
        << "\" height=\"" << ypix(b.q1) - ypix(b.q3)
        << "\" fill=\"#8fb8de\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << cx - half << "\" y1=\"" << ypix(b.med) << "\" x2=\"" << cx + half
        << "\" y2=\"" << ypix(b.med) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << cx << "\" y=\"" << bottom + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << b.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

int cmd_report(const std::string& in_path, const std::string& format,
               const std::string& out_base) {
  json j = io::read_json_file(in_path);
  auto report = harness::report_from_json(j);
  return run_numeric([&] {
    if (format == "csv") {
      csv::Document doc;
      size_t n_samples = report.learners.front().rmse_samples.size();
      for (const auto& outcome : report.learners)
        doc.header.push_back(learners::tag_name(outcome.tag));
      doc.rows.resize(n_samples);
      for (size_t r = 0; r < n_samples; ++r)
        for (const auto& outcome : report.learners)
          doc.rows[r].push_back(format_double(outcome.rmse_samples[r]));
      csv::write_file(out_base + ".csv", doc);
    } else if (format == "svg") {
      std::ofstream out(out_base + ".svg", std::ios::binary);
      out << svg_boxplot(report);
    } else {
      throw NumericFailure("unknown report format '" + format + "'");
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regression benchmarking pipeline"};
  app.require_subcommand(1);

  if (const char* env = std::getenv("REGBENCH_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) harness::set_thread_count(static_cast<unsigned>(v));
  }

  std::string posts, out_dir, features, violations, in_path, out_path, recipe_path;
  std::string response = "total_violations";
  std::string learner_name, seeds_text, format = "csv";
  std::vector<std::string> config_paths;
  double threshold = 1.0;
  uint64_t seed = 1;
  int folds = 10;
  int threads = 0;
  app.add_option("--threads", threads, "worker thread count (0 = auto)");

  auto* sc_extract = app.add_subcommand("extract", "extract code snippets from posts");
  sc_extract->add_option("--posts", posts)->required();
  sc_extract->add_option("--out-dir", out_dir)->required();
  sc_extract->add_option("--features", features)->required();

  auto* sc_join = app.add_subcommand("join", "join features and violations into the table");
  sc_join->add_option("--features", features)->required();
  sc_join->add_option("--violations", violations)->required();
  sc_join->add_option("--posts", posts)->required();
  sc_join->add_option("--out", out_path)->required();

  auto* sc_transform = app.add_subcommand("transform", "skewness-driven column transforms");
  sc_transform->add_option("--in", in_path)->required();
  sc_transform->add_option("--response", response);
  sc_transform->add_option("--threshold", threshold);
  sc_transform->add_option("--out", out_path)->required();
  sc_transform->add_option("--recipe", recipe_path);

  auto* sc_correlate = app.add_subcommand("correlate", "rank correlation matrix");
  sc_correlate->add_option("--in", in_path)->required();
  sc_correlate->add_option("--out", out_path)->required();

  auto* sc_baseline = app.add_subcommand("baseline", "transformed multiple regression baseline");
  sc_baseline->add_option("--in", in_path)->required();
  sc_baseline->add_option("--response", response);
  sc_baseline->add_option("--threshold", threshold);
  sc_baseline->add_option("--out", out_path)->required();

  auto* sc_tune = app.add_subcommand("tune", "pick the best of 20 candidate configs by CV RMSE");
  sc_tune->add_option("--in", in_path)->required();
  sc_tune->add_option("--response", response);
  sc_tune->add_option("--learner", learner_name)->required();
  sc_tune->add_option("--seed", seed);
  sc_tune->add_option("--folds", folds);
  sc_tune->add_option("--out", out_path)->required();

  auto* sc_evaluate = app.add_subcommand("evaluate", "repeated k-fold comparison across learners");
  sc_evaluate->add_option("--in", in_path)->required();
  sc_evaluate->add_option("--response", response);
  sc_evaluate->add_option("--configs", config_paths)->required()->expected(-1);
  sc_evaluate->add_option("--folds", folds);
  sc_evaluate->add_option("--seeds", seeds_text)->required();
  sc_evaluate->add_option("--out", out_path)->required();

  auto* sc_report = app.add_subcommand("report", "export samples as CSV or an SVG boxplot");
  sc_report->add_option("--in", in_path)->required();
  sc_report->add_option("--format", format)->check(CLI::IsMember({"csv", "svg"}));
  sc_report->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream usage;
    int code = app.exit(e, usage, usage);
    std::cerr << usage.str();
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (threads > 0) harness::set_thread_count(static_cast<unsigned>(threads));

  try {
    if (sc_extract->parsed()) return cmd_extract(posts, out_dir, features);
    if (sc_join->parsed()) return cmd_join(features, violations, posts, out_path);
    if (sc_transform->parsed())
      return cmd_transform(in_path, response, threshold, out_path, recipe_path);
    if (sc_correlate->parsed()) return cmd_correlate(in_path, out_path);
    if (sc_baseline->parsed()) return cmd_baseline(in_path, response, threshold, out_path);
    if (sc_tune->parsed()) return cmd_tune(in_path, response, learner_name, seed, folds, out_path);
    if (sc_evaluate->parsed())
      return cmd_evaluate(in_path, response, config_paths, folds, seeds_text, out_path);
    if (sc_report->parsed()) return cmd_report(in_path, format, out_path);
  } catch (const std::exception& e) {
    // Errors escaping the subcommand bodies are input-stage failures
    // (bad paths, malformed files, unknown columns).
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
