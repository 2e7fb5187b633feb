#include <doctest.h>

#include "support/tempdir.hpp"
#include "taxoadapt/corpus.hpp"
#include "taxoadapt/errors.hpp"

using namespace taxoadapt;
using taxoadapt::testing::TempDir;

TEST_CASE("load_corpus accepts valid records and synthesizes ids") {
    TempDir dir("corpus");
    auto path = dir.write("c.jsonl",
                          R"({"title": "A", "abstract": "a text"})"
                          "\n"
                          R"({"id": "x1", "title": "B", "abstract": "b text", "venue": "ACL"})"
                          "\n");
    LoadResult r = load_corpus(path, "nlp");
    REQUIRE(r.corpus.size() == 2);
    CHECK(r.skipped.empty());
    CHECK(r.corpus.papers()[0].id == "p000001");  // zero-padded 1-based line index
    CHECK(r.corpus.papers()[1].id == "x1");
    CHECK(r.corpus.papers()[1].venue_tag == "ACL");
    CHECK(r.corpus.topic() == "nlp");
    CHECK(r.corpus.by_id("x1").title == "B");
    CHECK_THROWS_AS(r.corpus.by_id("nope"), CorpusError);
}

TEST_CASE("load_corpus skips bad records with line-accurate reasons") {
    TempDir dir("corpus");
    auto path = dir.write("c.jsonl",
                          "not json\n"
                          R"({"title": "", "abstract": "a"})"
                          "\n"
                          R"({"title": "T", "abstract": "  "})"
                          "\n"
                          R"({"title": "T", "abstract": "a"})"
                          "\n"
                          R"({"title": "T", "abstract": "a"})"
                          "\n"
                          R"({"id": "p000004", "title": "U", "abstract": "b"})"
                          "\n"
                          "\n"
                          R"(["array"])"
                          "\n");
    LoadResult r = load_corpus(path, "nlp");
    // Line 4 is the valid copy; line 5 is a (title, abstract) duplicate; line 6
    // collides with line 4's synthesized id.
    REQUIRE(r.corpus.size() == 1);
    REQUIRE(r.skipped.size() == 6);
    CHECK(r.skipped[0].line_number == 1);
    CHECK(r.skipped[0].reason == "malformed JSON");
    CHECK(r.skipped[1].reason == "missing or empty title");
    CHECK(r.skipped[2].reason == "missing or empty abstract");
    CHECK(r.skipped[3].line_number == 5);
    CHECK(r.skipped[3].reason == "duplicate (title, abstract)");
    CHECK(r.skipped[4].reason == "duplicate id: p000004");
    CHECK(r.skipped[5].line_number == 8);

    nlohmann::json report = skip_report_json(r.skipped);
    CHECK(report["count"] == 6);
    CHECK(report["skipped"].size() == 6);
    CHECK(report["skipped"][0]["line"] == 1);
}

TEST_CASE("load_corpus is fatal on zero valid records and missing files") {
    TempDir dir("corpus");
    CHECK_THROWS_AS(load_corpus(dir / "missing.jsonl", "nlp"), CorpusError);
    auto empty = dir.write("empty.jsonl", "not json\n");
    CHECK_THROWS_AS(load_corpus(empty, "nlp"), CorpusError);
}

TEST_CASE("corpus constructor enforces its invariants") {
    CHECK_THROWS_AS(Corpus("t", {}), CorpusError);
    CHECK_THROWS_AS(Corpus("t", {{"a", "T", "x", {}, ""}, {"a", "U", "y", {}, ""}}), CorpusError);
    CHECK_THROWS_AS(Corpus("t", {{"a", " ", "x", {}, ""}}), CorpusError);
    CHECK_THROWS_AS(Corpus("t", {{"a", "T", "", {}, ""}}), CorpusError);
}

TEST_CASE("dimension_view requires classification and preserves corpus order") {
    Corpus c("t", {{"a", "T", "x", {}, ""}, {"b", "U", "y", {}, ""}, {"c", "V", "z", {}, ""}});
    CHECK_FALSE(c.classified());
    CHECK_THROWS_AS(c.dimension_view(Dimension::task), CorpusError);

    c.by_id("a").dimensions = {Dimension::task, Dimension::datasets};
    c.by_id("b").dimensions = {Dimension::task};
    c.by_id("c").dimensions = {Dimension::task, Dimension::datasets};
    CHECK(c.classified());
    auto task_view = c.dimension_view(Dimension::task);
    REQUIRE(task_view.size() == 3);
    auto ds_view = c.dimension_view(Dimension::datasets);
    REQUIRE(ds_view.size() == 2);
    CHECK(ds_view[0]->id == "a");
    CHECK(ds_view[1]->id == "c");
    CHECK(c.dimension_view(Dimension::methodology).empty());
}

TEST_CASE("corpus json round trip keeps dimensions and venue") {
    Corpus c("t", {{"a", "T", "x", {Dimension::task, Dimension::real_world_domains}, "EMNLP"},
                   {"b", "U", "y", {}, ""}});
    Corpus back = Corpus::from_json(c.to_json());
    CHECK(back.topic() == "t");
    REQUIRE(back.size() == 2);
    CHECK(back.by_id("a").venue_tag == "EMNLP");
    CHECK(back.by_id("a").dimensions ==
          std::set<Dimension>{Dimension::task, Dimension::real_world_domains});
    CHECK(back.by_id("b").dimensions.empty());
    CHECK(c.to_json() == back.to_json());
}
