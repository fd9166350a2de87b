// End-to-end smoke test: drives the installed CLI binary through the whole
// pipeline on a small generated corpus and checks exit codes and artifacts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "regbench/csv.hpp"
#include "regbench/datatable.hpp"
#include "regbench/model_io.hpp"
#include "regbench/rng.hpp"

namespace fs = std::filesystem;
using namespace regbench;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
  if (!ok) failures++;
}

int run(const std::string& args) {
  std::string cmd = std::string(REGBENCH_CLI_PATH) + " " + args + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_fixtures(const fs::path& dir) {
  SplitMix64 rng(2024);
  csv::Document posts;
  posts.header = {"answer_id", "question_id", "answer_score", "question_score",
                  "view_count", "answer_count", "comment_count", "accepted", "answer_body"};
  csv::Document violations;
  violations.header = {"snippet_id", "reliability", "readability", "performance", "security"};

  int64_t snippet_id = 0;
  for (int a = 1; a <= 60; ++a) {
    std::ostringstream body;
    int snippets = 1 + static_cast<int>(rng.next_below(3));
    for (int s = 0; s < snippets; ++s) {
      snippet_id++;
      body << "<p>try</p><pre><code>int v" << snippet_id << " = 1;\n";
      int extra = static_cast<int>(rng.next_below(20));
      for (int l = 0; l < extra; ++l)
        body << "v" << snippet_id << " += " << l << ";"
             << std::string(rng.next_below(4), ' ') << "\n";
      body << "</code></pre>";
      violations.rows.push_back({std::to_string(snippet_id),
                                 std::to_string(rng.next_below(5)),
                                 std::to_string(rng.next_below(4)),
                                 std::to_string(rng.next_below(3)),
                                 std::to_string(rng.next_below(2))});
    }
    posts.rows.push_back({std::to_string(a), std::to_string(a + 9000),
                          std::to_string(rng.next_below(30)),
                          std::to_string(rng.next_below(50)),
                          std::to_string(100 + rng.next_below(40000)),
                          std::to_string(1 + rng.next_below(6)),
                          std::to_string(rng.next_below(9)),
                          std::to_string(rng.next_below(2)), body.str()});
  }
  csv::write_file((dir / "posts.csv").string(), posts);
  csv::write_file((dir / "violations.csv").string(), violations);
}

}  // namespace

int main() {
  fs::path dir = fs::temp_directory_path() / "regbench_cli_smoke";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_fixtures(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };

  check(run("extract --posts " + p("posts.csv") + " --out-dir " + p("snippets") +
            " --features " + p("features.csv")) == 0,
        "extract succeeds");
  check(fs::exists(dir / "snippets" / "C1.java"), "extract writes C1.java");
  check(fs::exists(dir / "features.csv"), "extract writes the features table");

  check(run("join --features " + p("features.csv") + " --violations " + p("violations.csv") +
            " --posts " + p("posts.csv") + " --out " + p("table.csv")) == 0,
        "join succeeds");
  DataTable table = load_csv(p("table.csv"));
  check(table.n_cols() == 15, "modeling table has 15 columns");
  check(table.n_rows() > 50, "modeling table has one row per snippet");

  check(run("transform --in " + p("table.csv") + " --response total_violations --out " +
            p("transformed.csv") + " --recipe " + p("recipe.json")) == 0,
        "transform succeeds");
  check(fs::exists(dir / "recipe.json"), "transform writes the recipe");

  check(run("correlate --in " + p("table.csv") + " --out " + p("corr.json")) == 0,
        "correlate succeeds");
  auto corr = io::read_json_file(p("corr.json"));
  check(corr.contains("meta") && corr["meta"]["tool_version"] == "0.1.0",
        "correlate embeds tool metadata");
  check(corr["meta"]["input_fingerprint"] == io::file_fingerprint(p("table.csv")),
        "correlate embeds the input content hash");

  check(run("baseline --in " + p("table.csv") + " --response total_violations --out " +
            p("baseline.json")) == 0,
        "baseline succeeds");

  check(run("tune --in " + p("table.csv") + " --response total_violations --learner cart "
            "--seed 17 --folds 4 --out " + p("cart.json")) == 0,
        "tune succeeds");
  check(run("tune --in " + p("table.csv") + " --response total_violations --learner linear "
            "--seed 17 --folds 4 --out " + p("linear.json")) == 0,
        "tune(linear) succeeds");

  check(run("evaluate --in " + p("table.csv") + " --response total_violations --configs " +
            p("cart.json") + " " + p("linear.json") +
            " --folds 4 --seeds 11,12 --out " + p("report.json")) == 0,
        "evaluate succeeds");
  if (!fs::exists(dir / "report.json")) {
    check(false, "evaluate wrote report.json");
    std::cout << "cli smoke: FAILURES\n";
    return 1;
  }
  auto report = io::read_json_file(p("report.json"));
  check(report.contains("ranking") && report["ranking"].size() == 2,
        "evaluate report carries the ranking");

  check(run("report --in " + p("report.json") + " --format csv --out " + p("fig")) == 0,
        "report --format csv succeeds");
  check(fs::exists(dir / "fig.csv"), "report writes fig.csv");
  check(run("report --in " + p("report.json") + " --format svg --out " + p("fig")) == 0,
        "report --format svg succeeds");
  auto svg = read_text(dir / "fig.svg");
  check(svg.rfind("<svg", 0) == 0 && svg.find("</svg>") != std::string::npos,
        "report writes a self-contained svg");

  // Exit codes: missing input -> 1; bad flags -> 1.
  check(run("correlate --in " + p("nope.csv") + " --out " + p("x.json")) == 1,
        "missing input exits with 1");
  check(run("tune --in " + p("table.csv") + " --learner forest --out " + p("x.json")) == 1,
        "unknown learner exits with 1");
  check(run("bogus-subcommand") == 1, "unknown subcommand exits with 1");

  // Determinism across thread counts, driven through the environment knob.
  std::string base = std::string(REGBENCH_CLI_PATH) + " evaluate --in " + p("table.csv") +
                     " --response total_violations --configs " + p("cart.json") + " " +
                     p("linear.json") + " --folds 4 --seeds 11,12 --out ";
  std::system(("REGBENCH_THREADS=1 " + base + p("r1.json") + " 2>/dev/null").c_str());
  std::system(("REGBENCH_THREADS=8 " + base + p("r8.json") + " 2>/dev/null").c_str());
  check(read_text(dir / "r1.json") == read_text(dir / "r8.json"),
        "REGBENCH_THREADS does not change evaluate output");

  fs::remove_all(dir);
  std::cout << (failures == 0 ? "cli smoke: all checks passed\n"
                              : "cli smoke: FAILURES\n");
  return failures == 0 ? 0 : 1;
}
