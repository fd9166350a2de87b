#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "regbench/ingest.hpp"

using namespace regbench;
namespace fs = std::filesystem;

namespace {

ingest::PostRecord make_post(int64_t answer_id, std::string body) {
  ingest::PostRecord p;
  p.answer_id = answer_id;
  p.question_id = answer_id + 1000;
  p.answer_body = std::move(body);
  return p;
}

}  // namespace

TEST_CASE("ingest: pre/code blocks extracted, inline code skipped") {
  std::string body =
      "<p>Use <code>foo()</code> like this:</p>"
      "<pre><code>int a = 1;\nint b = 2;\n</code></pre>"
      "<p>or</p><pre><code>second();</code></pre>";
  auto blocks = ingest::extract_code_blocks(body);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0] == "int a = 1;\nint b = 2;\n");
  CHECK(blocks[1] == "second();");
}

TEST_CASE("ingest: html entities decoded") {
  auto blocks = ingest::extract_code_blocks(
      "<pre><code>if (a &lt; b &amp;&amp; c &gt; d) s = &quot;x&quot; + &#39;y&#39;;</code></pre>");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0] == "if (a < b && c > d) s = \"x\" + 'y';");
}

TEST_CASE("ingest: malformed tag nesting reported") {
  CHECK_THROWS_WITH_AS(ingest::extract_code_blocks("<pre><code>open"),
                       doctest::Contains("malformed post"), std::runtime_error);
  CHECK_THROWS_AS(ingest::extract_code_blocks("<pre><code>a<pre><code>b</code></pre></code></pre>"),
                  std::runtime_error);
}

TEST_CASE("ingest: multiline filter keeps only snippets containing a newline") {
  auto kept = ingest::filter_multiline({"one line", "a\nb", "trailing only\n", "x\ny\n"});
  CHECK(kept == std::vector<std::string>{"a\nb", "trailing only\n", "x\ny\n"});
}

TEST_CASE("ingest: wrap adds a class shell only for bare fragments") {
  CHECK(ingest::wrap_snippet("import java.util.List;\nList<int> l;", 3) ==
        "import java.util.List;\nList<int> l;");
  CHECK(ingest::wrap_snippet("package com.x;\nint a;", 3) == "package com.x;\nint a;");
  CHECK(ingest::wrap_snippet("class Foo {\n}", 3) == "class Foo {\n}");
  // "classes" must not count as the keyword `class`.
  auto wrapped = ingest::wrap_snippet("int classes = 2;\nclasses++;", 7);
  CHECK(wrapped.find("public class C7") != std::string::npos);
  CHECK(wrapped.find("int classes = 2;") != std::string::npos);
  CHECK(ingest::snippet_filename(7) == "C7.java");
}

TEST_CASE("ingest: attribute computation") {
  auto a = ingest::compute_attributes("int a = 1;\nint b;\n");
  CHECK(a.loc == 2);  // the single trailing newline does not open a third line
  CHECK(a.code_length == 18);
  CHECK(a.code_spaces == 4);
  auto b = ingest::compute_attributes("x\n\ny");
  CHECK(b.loc == 3);
}

TEST_CASE("ingest: extraction orders by answer id and numbers sequentially") {
  std::vector<ingest::PostRecord> posts = {
      make_post(20, "<pre><code>c\nd</code></pre>"),
      make_post(10, "<pre><code>a\nb</code></pre><pre><code>skip</code></pre>"
                    "<pre><code>e\nf</code></pre>"),
  };
  auto result = ingest::extract_snippets(posts);
  CHECK(result.blocks_extracted == 4);
  REQUIRE(result.snippets.size() == 3);
  CHECK(result.snippets[0].snippet_id == 1);
  CHECK(result.snippets[0].answer_id == 10);
  CHECK(result.snippets[0].code == "a\nb");
  CHECK(result.snippets[1].code == "e\nf");
  CHECK(result.snippets[2].answer_id == 20);
  CHECK(result.snippets[0].spa == 2);  // two retained snippets for answer 10
  CHECK(result.snippets[2].spa == 1);
}

TEST_CASE("ingest: whitespace-only multiline snippets dropped with a count") {
  auto result = ingest::extract_snippets({make_post(1, "<pre><code> \n \n</code></pre>")});
  CHECK(result.snippets.empty());
  CHECK(result.whitespace_only_dropped == 1);
}

TEST_CASE("ingest: features table round trip") {
  auto result = ingest::extract_snippets({make_post(5, "<pre><code>a b\nc\n</code></pre>")});
  auto table = ingest::snippet_features_table(result.snippets);
  CHECK(table.names() == std::vector<std::string>{"snippet_id", "answer_id", "loc",
                                                  "code_length", "code_spaces", "spa"});
  auto back = ingest::snippets_from_features_table(table);
  REQUIRE(back.size() == 1);
  CHECK(back[0].snippet_id == result.snippets[0].snippet_id);
  CHECK(back[0].loc == result.snippets[0].loc);
  CHECK(back[0].code_spaces == 1);
}

TEST_CASE("ingest: modeling table join") {
  ingest::PostRecord post = make_post(10, "");
  post.answer_score = 3;
  post.question_score = 5;
  post.view_count = 100;
  post.answer_count = 2;
  post.comment_count = 1;
  post.accepted = true;

  ingest::SnippetRecord s1{1, 10, "", 4, 50, 9, 0};
  ingest::SnippetRecord s2{2, 10, "", 6, 70, 12, 0};
  ingest::ViolationCounts v1{1, 2, 1, 0, 0, 3};
  ingest::ViolationCounts v2{2, 0, 0, 1, 1, 2};

  auto table = ingest::build_modeling_table({post}, {s1, s2}, {v1, v2});
  CHECK(table.names() == ingest::kModelingColumns);
  REQUIRE(table.n_rows() == 2);
  CHECK(table.column("question_score")[0] == 5);
  CHECK(table.column("accepted")[1] == 1);
  CHECK(table.column("spa") == std::vector<double>{2, 2});  // recomputed in the join
  CHECK(table.column("total_violations") == std::vector<double>{3, 2});
  CHECK(table.column("reliability")[0] == 2);

  // Dangling keys are named in the error.
  CHECK_THROWS_WITH_AS(ingest::build_modeling_table({post}, {s1, s2}, {v1}),
                       doctest::Contains("2"), std::runtime_error);
  ingest::SnippetRecord orphan{3, 99, "", 1, 1, 0, 0};
  CHECK_THROWS_AS(ingest::build_modeling_table({post}, {s1, s2, orphan}, {v1, v2, {3}}),
                  std::runtime_error);
  CHECK_THROWS_AS(ingest::build_modeling_table({post}, {s1, s1}, {v1, v2}),
                  std::runtime_error);  // duplicate snippet id
}

TEST_CASE("ingest: posts csv validation") {
  auto path = fs::temp_directory_path() / "regbench_posts.csv";
  {
    std::ofstream out(path, std::ios::binary);
    out << "answer_id,question_id,answer_score,question_score,view_count,answer_count,"
           "comment_count,accepted,answer_body\n";
    out << "1,2,3,4,5,6,7,1,\"<pre><code>a\nb</code></pre>\"\n";
  }
  auto posts = ingest::load_posts_csv(path.string());
  REQUIRE(posts.size() == 1);
  CHECK(posts[0].accepted);
  CHECK(posts[0].view_count == 5);
  {
    std::ofstream out(path, std::ios::binary);
    out << "answer_id,question_id,answer_score,question_score,view_count,answer_count,"
           "comment_count,accepted,answer_body\n1,2,3,4,5,6,7,2,x\n";
  }
  CHECK_THROWS(ingest::load_posts_csv(path.string()));  // accepted must be 0/1
  fs::remove(path);
}
