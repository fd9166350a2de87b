#pragma once

#include <string>

#include "json.hpp"
#include "regbench/atlm.hpp"
#include "regbench/learners.hpp"
#include "regbench/stats.hpp"

namespace regbench::io {

using json = nlohmann::json;

json config_to_json(const learners::LearnerConfig& config);
learners::LearnerConfig config_from_json(const json& j);

// Versioned model document: {schema_version, learner, params, seed, structure}.
json model_to_json(const learners::FittedModel& model);
learners::FittedModel model_from_json(const json& j);

json recipe_to_json(const atlm::TransformRecipe& recipe);
atlm::TransformRecipe recipe_from_json(const json& j);

json ols_report_to_json(const stats::OlsReport& report);
json baseline_to_json(const atlm::BaselineReport& report);
json kruskal_to_json(const stats::KruskalResult& result);
json correlation_matrix_to_json(const std::vector<std::string>& names,
                                const std::vector<std::vector<stats::CorrelationCell>>& cells);

void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

// FNV-1a 64-bit over the raw bytes, hex encoded; used as the content
// fingerprint embedded in reports.
std::string file_fingerprint(const std::string& path);

}  // namespace regbench::io
