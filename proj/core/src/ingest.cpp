#include "regbench/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <iostream>
#include <map>
#include <set>
#include <stdexcept>

#include "regbench/csv.hpp"

namespace regbench::ingest {

const std::vector<std::string> kModelingColumns = {
    "question_score", "view_count",  "answer_count", "comment_count", "answer_score",
    "code_length",    "code_spaces", "loc",          "spa",           "accepted",
    "reliability",    "readability", "performance",  "security",      "total_violations"};

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::string decode_entities(const std::string& text) {
  static const std::pair<const char*, char> kEntities[] = {
      {"&lt;", '<'}, {"&gt;", '>'}, {"&amp;", '&'}, {"&quot;", '"'}, {"&#39;", '\''}};
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    bool matched = false;
    if (text[i] == '&') {
      for (const auto& [ent, ch] : kEntities) {
        size_t len = std::char_traits<char>::length(ent);
        if (text.compare(i, len, ent) == 0) {
          out += ch;
          i += len;
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      out += text[i];
      ++i;
    }
  }
  return out;
}

// Position just past the '>' of a tag that starts at `pos` (which points at
// '<'); attributes are accepted, a missing '>' is malformed.
size_t skip_tag(const std::string& body, size_t pos) {
  size_t close = body.find('>', pos);
  if (close == std::string::npos)
    throw std::runtime_error("malformed post: tag without closing '>'");
  return close + 1;
}

bool tag_at(const std::string& body, size_t pos, const std::string& name) {
  if (body.compare(pos, 1 + name.size(), "<" + name) != 0) return false;
  char next = pos + 1 + name.size() < body.size() ? body[pos + 1 + name.size()] : '\0';
  return next == '>' || next == ' ' || next == '\t' || next == '\n' || next == '/';
}

}  // namespace

std::vector<std::string> extract_code_blocks(const std::string& post_body) {
  std::vector<std::string> blocks;
  size_t pos = 0;
  while ((pos = post_body.find("<pre", pos)) != std::string::npos) {
    if (!tag_at(post_body, pos, "pre")) {
      ++pos;
      continue;
    }
    size_t inner = skip_tag(post_body, pos);
    while (inner < post_body.size() &&
           std::isspace(static_cast<unsigned char>(post_body[inner])))
      ++inner;
    if (!tag_at(post_body, inner, "code"))
      throw std::runtime_error("malformed post: <pre> without nested <code>");
    size_t code_start = skip_tag(post_body, inner);
    size_t code_end = post_body.find("</code>", code_start);
    if (code_end == std::string::npos)
      throw std::runtime_error("malformed post: unbalanced <pre><code> block");
    std::string raw = post_body.substr(code_start, code_end - code_start);
    if (raw.find("<pre") != std::string::npos || raw.find("<code") != std::string::npos)
      throw std::runtime_error("malformed post: nested pre/code tags inside a code block");
    size_t pre_end = post_body.find("</pre>", code_end);
    if (pre_end == std::string::npos)
      throw std::runtime_error("malformed post: <pre><code> block missing </pre>");
    blocks.push_back(decode_entities(raw));
    pos = pre_end + 6;
  }
  return blocks;
}

std::vector<std::string> filter_multiline(const std::vector<std::string>& snippets) {
  std::vector<std::string> out;
  for (const auto& s : snippets) {
    if (s.find('\n') != std::string::npos) out.push_back(s);
  }
  return out;
}

std::string snippet_filename(int64_t snippet_id) {
  return "C" + std::to_string(snippet_id) + ".java";
}

std::string wrap_snippet(const std::string& code, int64_t snippet_id) {
  // Whole-word token match: `classify` must not count as `class`.
  static const std::set<std::string> kKeywords = {"import", "package", "class"};
  size_t i = 0;
  while (i < code.size()) {
    if (is_ident_char(code[i])) {
      size_t j = i;
      while (j < code.size() && is_ident_char(code[j])) ++j;
      if (kKeywords.count(code.substr(i, j - i))) return code;
      i = j;
    } else {
      ++i;
    }
  }
  return "public class C" + std::to_string(snippet_id) + "{\n" + code + "\n}";
}

CodeAttributes compute_attributes(const std::string& code) {
  if (code.empty()) throw std::runtime_error("compute_attributes: empty snippet");
  CodeAttributes attrs;
  attrs.code_length = static_cast<int64_t>(code.size());
  attrs.code_spaces = std::count(code.begin(), code.end(), ' ');
  std::string body = code;
  if (!body.empty() && body.back() == '\n') body.pop_back();
  attrs.loc = 1 + std::count(body.begin(), body.end(), '\n');
  return attrs;
}

namespace {

int64_t parse_int(const std::string& cell, const std::string& what) {
  int64_t v = 0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw std::runtime_error("ingest: non-integer " + what + " value '" + cell + "'");
  return v;
}

size_t require_column(const csv::Document& doc, const std::string& name) {
  auto it = std::find(doc.header.begin(), doc.header.end(), name);
  if (it == doc.header.end())
    throw std::runtime_error("ingest: missing required column '" + name + "'");
  return static_cast<size_t>(it - doc.header.begin());
}

}  // namespace

std::vector<PostRecord> load_posts_csv(const std::string& path) {
  auto doc = csv::read_file(path);
  size_t c_aid = require_column(doc, "answer_id");
  size_t c_qid = require_column(doc, "question_id");
  size_t c_ascore = require_column(doc, "answer_score");
  size_t c_qscore = require_column(doc, "question_score");
  size_t c_views = require_column(doc, "view_count");
  size_t c_answers = require_column(doc, "answer_count");
  size_t c_comments = require_column(doc, "comment_count");
  size_t c_accepted = require_column(doc, "accepted");
  size_t c_body = require_column(doc, "answer_body");

  std::vector<PostRecord> posts;
  std::set<int64_t> seen;
  for (const auto& row : doc.rows) {
    PostRecord p;
    p.answer_id = parse_int(row[c_aid], "answer_id");
    p.question_id = parse_int(row[c_qid], "question_id");
    p.answer_score = parse_int(row[c_ascore], "answer_score");
    p.question_score = parse_int(row[c_qscore], "question_score");
    p.view_count = parse_int(row[c_views], "view_count");
    p.answer_count = parse_int(row[c_answers], "answer_count");
    p.comment_count = parse_int(row[c_comments], "comment_count");
    int64_t acc = parse_int(row[c_accepted], "accepted");
    if (acc != 0 && acc != 1)
      throw std::runtime_error("ingest: accepted must be 0/1, got " + row[c_accepted]);
    p.accepted = acc == 1;
    p.answer_body = row[c_body];
    if (p.view_count < 0 || p.answer_count < 0 || p.comment_count < 0)
      throw std::runtime_error("ingest: negative count for answer " +
                               std::to_string(p.answer_id));
    if (!seen.insert(p.answer_id).second)
      throw std::runtime_error("ingest: duplicate answer_id " + std::to_string(p.answer_id));
    posts.push_back(std::move(p));
  }
  return posts;
}

std::vector<ViolationCounts> load_violations_csv(const std::string& path) {
  auto doc = csv::read_file(path);
  size_t c_sid = require_column(doc, "snippet_id");
  size_t c_rel = require_column(doc, "reliability");
  size_t c_read = require_column(doc, "readability");
  size_t c_perf = require_column(doc, "performance");
  size_t c_sec = require_column(doc, "security");
  std::vector<ViolationCounts> out;
  for (const auto& row : doc.rows) {
    ViolationCounts v;
    v.snippet_id = parse_int(row[c_sid], "snippet_id");
    v.reliability = parse_int(row[c_rel], "reliability");
    v.readability = parse_int(row[c_read], "readability");
    v.performance = parse_int(row[c_perf], "performance");
    v.security = parse_int(row[c_sec], "security");
    if (v.reliability < 0 || v.readability < 0 || v.performance < 0 || v.security < 0)
      throw std::runtime_error("ingest: negative violation count for snippet " +
                               std::to_string(v.snippet_id));
    v.total = v.reliability + v.readability + v.performance + v.security;
    out.push_back(v);
  }
  return out;
}

ExtractionResult extract_snippets(const std::vector<PostRecord>& posts) {
  std::vector<const PostRecord*> ordered;
  ordered.reserve(posts.size());
  for (const auto& p : posts) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](const PostRecord* a, const PostRecord* b) { return a->answer_id < b->answer_id; });

  ExtractionResult result;
  int64_t next_id = 1;
  for (const PostRecord* post : ordered) {
    std::vector<std::string> blocks;
    try {
      blocks = extract_code_blocks(post->answer_body);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(e.what()) + " (answer_id " +
                               std::to_string(post->answer_id) + ")");
    }
    result.blocks_extracted += blocks.size();
    size_t first_of_answer = result.snippets.size();
    for (const auto& code : filter_multiline(blocks)) {
      if (code.find_first_not_of(" \t\r\n") == std::string::npos) {
        std::cerr << "warning: dropping whitespace-only snippet in answer "
                  << post->answer_id << "\n";
        result.whitespace_only_dropped++;
        continue;
      }
      SnippetRecord s;
      s.snippet_id = next_id++;
      s.answer_id = post->answer_id;
      s.code = code;
      auto attrs = compute_attributes(code);
      s.loc = attrs.loc;
      s.code_length = attrs.code_length;
      s.code_spaces = attrs.code_spaces;
      result.snippets.push_back(std::move(s));
    }
    int64_t spa = static_cast<int64_t>(result.snippets.size() - first_of_answer);
    for (size_t i = first_of_answer; i < result.snippets.size(); ++i)
      result.snippets[i].spa = spa;
  }
  return result;
}

DataTable snippet_features_table(const std::vector<SnippetRecord>& snippets) {
  std::vector<std::string> names = {"snippet_id", "answer_id",   "loc",
                                    "code_length", "code_spaces", "spa"};
  std::vector<std::vector<double>> cols(names.size());
  for (const auto& s : snippets) {
    cols[0].push_back(static_cast<double>(s.snippet_id));
    cols[1].push_back(static_cast<double>(s.answer_id));
    cols[2].push_back(static_cast<double>(s.loc));
    cols[3].push_back(static_cast<double>(s.code_length));
    cols[4].push_back(static_cast<double>(s.code_spaces));
    cols[5].push_back(static_cast<double>(s.spa));
  }
  return DataTable(std::move(names), std::move(cols));
}

std::vector<SnippetRecord> snippets_from_features_table(const DataTable& features) {
  std::vector<SnippetRecord> out;
  const auto& sid = features.column("snippet_id");
  const auto& aid = features.column("answer_id");
  const auto& loc = features.column("loc");
  const auto& len = features.column("code_length");
  const auto& spc = features.column("code_spaces");
  const auto& spa = features.column("spa");
  for (size_t r = 0; r < features.n_rows(); ++r) {
    SnippetRecord s;
    s.snippet_id = static_cast<int64_t>(sid[r]);
    s.answer_id = static_cast<int64_t>(aid[r]);
    s.loc = static_cast<int64_t>(loc[r]);
    s.code_length = static_cast<int64_t>(len[r]);
    s.code_spaces = static_cast<int64_t>(spc[r]);
    s.spa = static_cast<int64_t>(spa[r]);
    out.push_back(s);
  }
  return out;
}

DataTable build_modeling_table(const std::vector<PostRecord>& posts,
                               const std::vector<SnippetRecord>& snippets,
                               const std::vector<ViolationCounts>& violations) {
  std::map<int64_t, const PostRecord*> post_by_id;
  for (const auto& p : posts) post_by_id[p.answer_id] = &p;

  std::map<int64_t, const ViolationCounts*> viol_by_id;
  for (const auto& v : violations) {
    if (!viol_by_id.emplace(v.snippet_id, &v).second)
      throw std::runtime_error("join: duplicate snippet_id " + std::to_string(v.snippet_id) +
                               " in violations");
  }
  std::set<int64_t> snippet_ids;
  std::map<int64_t, int64_t> spa_by_answer;
  for (const auto& s : snippets) {
    snippet_ids.insert(s.snippet_id);
    spa_by_answer[s.answer_id]++;
  }
  for (const auto& v : violations) {
    if (!snippet_ids.count(v.snippet_id))
      throw std::runtime_error("join: violations reference unknown snippet_id " +
                               std::to_string(v.snippet_id));
  }

  std::vector<std::vector<double>> cols(kModelingColumns.size());
  for (const auto& s : snippets) {
    auto vit = viol_by_id.find(s.snippet_id);
    if (vit == viol_by_id.end())
      throw std::runtime_error("join: snippet " + std::to_string(s.snippet_id) +
                               " has no violations row");
    auto pit = post_by_id.find(s.answer_id);
    if (pit == post_by_id.end())
      throw std::runtime_error("join: snippet " + std::to_string(s.snippet_id) +
                               " references unknown answer_id " + std::to_string(s.answer_id));
    const PostRecord& p = *pit->second;
    const ViolationCounts& v = *vit->second;
    if (v.total != v.reliability + v.readability + v.performance + v.security)
      throw std::runtime_error("join: total violations mismatch for snippet " +
                               std::to_string(v.snippet_id));
    double vals[] = {static_cast<double>(p.question_score),
                     static_cast<double>(p.view_count),
                     static_cast<double>(p.answer_count),
                     static_cast<double>(p.comment_count),
                     static_cast<double>(p.answer_score),
                     static_cast<double>(s.code_length),
                     static_cast<double>(s.code_spaces),
                     static_cast<double>(s.loc),
                     static_cast<double>(spa_by_answer[s.answer_id]),
                     p.accepted ? 1.0 : 0.0,
                     static_cast<double>(v.reliability),
                     static_cast<double>(v.readability),
                     static_cast<double>(v.performance),
                     static_cast<double>(v.security),
                     static_cast<double>(v.total)};
    for (size_t c = 0; c < cols.size(); ++c) cols[c].push_back(vals[c]);
  }
  return DataTable(kModelingColumns, std::move(cols));
}

}  // namespace regbench::ingest
