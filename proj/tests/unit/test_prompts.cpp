#include <doctest.h>

#include "support/tempdir.hpp"
#include "taxoadapt/errors.hpp"
#include "taxoadapt/prompts.hpp"
#include "taxoadapt/schemas.hpp"

using namespace taxoadapt;
using taxoadapt::testing::TempDir;

TEST_CASE("builtin library covers every pipeline prompt with a registered schema") {
    PromptLibrary lib = PromptLibrary::builtin();
    const auto& schemas = SchemaRegistry::builtin();
    for (const char* id : {"init_children", "dim_classify", "enrich_node", "classify_children",
                           "pseudo_label", "cluster_subtopics", "consolidate_clusters",
                           "judge_path", "judge_siblings", "judge_dimension", "judge_relevance"}) {
        const PromptTemplate& t = lib.get(id);
        CHECK(t.id == id);
        CHECK_FALSE(t.version.empty());
        CHECK_FALSE(t.user_text.empty());
        CHECK(schemas.has(t.schema_id));
    }
    CHECK_THROWS_AS(lib.get("missing"), ConfigError);
}

TEST_CASE("render substitutes placeholders into system and user messages") {
    PromptTemplate t{"x", "1", "keywords", "You work on {{topic}}.",
                     "Node {{node}} in {{topic}}."};
    auto msgs = PromptLibrary::render(t, {{"topic", "nlp"}, {"node", "parsing"}});
    REQUIRE(msgs.size() == 2);
    CHECK(msgs[0].role == "system");
    CHECK(msgs[0].text == "You work on nlp.");
    CHECK(msgs[1].role == "user");
    CHECK(msgs[1].text == "Node parsing in nlp.");

    // Unbound placeholders are template bugs, not silent passthrough.
    PromptTemplate loose{"z", "1", "keywords", "", "missing {{gone}}"};
    CHECK_THROWS_AS(PromptLibrary::render(loose, {}), ConfigError);

    PromptTemplate no_system{"y", "1", "keywords", "", "hi"};
    CHECK(PromptLibrary::render(no_system, {}).size() == 1);
}

TEST_CASE("override files swap wording while keeping the rest of the library") {
    TempDir dir("prompts");
    auto path = dir.write("overrides.json", R"({
      "prompts": [
        {"id": "enrich_node", "version": "v2-custom", "schema": "keywords",
         "system": "s", "user": "custom wording for {{node_label}}"}
      ]
    })");
    PromptLibrary lib = PromptLibrary::builtin();
    lib.load_overrides(path);
    CHECK(lib.get("enrich_node").version == "v2-custom");
    CHECK(lib.get("enrich_node").user_text.find("custom wording") != std::string::npos);
    CHECK_FALSE(lib.get("classify_children").user_text.empty());  // untouched

    CHECK_THROWS_AS(lib.load_overrides(dir / "nope.json"), ConfigError);
    auto bad = dir.write("bad.json", "[]");
    CHECK_THROWS_AS(lib.load_overrides(bad), ConfigError);
}
