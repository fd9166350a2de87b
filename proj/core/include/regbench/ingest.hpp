#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "regbench/datatable.hpp"

namespace regbench::ingest {

struct PostRecord {
  int64_t answer_id = 0;
  int64_t question_id = 0;
  int64_t answer_score = 0;
  int64_t question_score = 0;
  int64_t view_count = 0;
  int64_t answer_count = 0;
  int64_t comment_count = 0;
  bool accepted = false;
  std::string answer_body;
};

struct SnippetRecord {
  int64_t snippet_id = 0;
  int64_t answer_id = 0;
  std::string code;
  int64_t loc = 0;
  int64_t code_length = 0;
  int64_t code_spaces = 0;
  int64_t spa = 0;
};

struct ViolationCounts {
  int64_t snippet_id = 0;
  int64_t reliability = 0;
  int64_t readability = 0;
  int64_t performance = 0;
  int64_t security = 0;
  int64_t total = 0;
};

// <pre><code>...</code></pre> blocks in document order; in-line <code> spans
// are skipped. HTML entities lt/gt/amp/quot/#39 are decoded in the output.
std::vector<std::string> extract_code_blocks(const std::string& post_body);

std::vector<std::string> filter_multiline(const std::vector<std::string>& snippets);

// Snippets lacking a whole-word `import`/`package`/`class` token get a
// `public class C<id>{ ... }` shell; the target filename is C<id>.java.
std::string wrap_snippet(const std::string& code, int64_t snippet_id);
std::string snippet_filename(int64_t snippet_id);

struct CodeAttributes {
  int64_t loc = 0;
  int64_t code_length = 0;
  int64_t code_spaces = 0;
};
CodeAttributes compute_attributes(const std::string& code);

std::vector<PostRecord> load_posts_csv(const std::string& path);
std::vector<ViolationCounts> load_violations_csv(const std::string& path);

struct ExtractionResult {
  std::vector<SnippetRecord> snippets;   // ordered by (answer_id, document order)
  size_t blocks_extracted = 0;           // before multiline filtering
  size_t whitespace_only_dropped = 0;
};
ExtractionResult extract_snippets(const std::vector<PostRecord>& posts);

DataTable snippet_features_table(const std::vector<SnippetRecord>& snippets);
std::vector<SnippetRecord> snippets_from_features_table(const DataTable& features);

// One row per snippet with violation data; the 15 modeling columns in the
// fixed order question_score..total_violations.
DataTable build_modeling_table(const std::vector<PostRecord>& posts,
                               const std::vector<SnippetRecord>& snippets,
                               const std::vector<ViolationCounts>& violations);

extern const std::vector<std::string> kModelingColumns;

}  // namespace regbench::ingest
