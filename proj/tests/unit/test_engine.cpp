#include <doctest.h>

#include <memory>

#include "support/scenario.hpp"
#include "support/tempdir.hpp"
#include "taxoadapt/engine.hpp"
#include "taxoadapt/errors.hpp"
#include "taxoadapt/scripted_backend.hpp"

using namespace taxoadapt;
using namespace taxoadapt::testing;
using nlohmann::json;

namespace {

RunResult run_scenario(const Scenario& sc, Corpus& corpus) {
    auto backend = std::make_shared<ScriptedBackend>(sc.script());
    Gateway gw(backend);
    PromptLibrary prompts = PromptLibrary::builtin();
    return run_expansion(sc.engine_config(), corpus, gw, prompts);
}

Corpus corpus_of(const Scenario& sc) {
    TempDir dir("engine");
    return load_corpus(sc.write_corpus(dir.path()), sc.topic).corpus;
}

}  // namespace

TEST_CASE("expansion decisions use strict thresholds") {
    Taxonomy tax(Dimension::task, "root", "", 2);
    for (int i = 0; i < 10; ++i) tax.map_paper("root", "p" + std::to_string(i));

    // Leaf: depth iff rho > delta.
    CHECK(decide_expansion(tax, "root", 10).kind == ExpansionDecision::Kind::none);
    CHECK(decide_expansion(tax, "root", 9).kind == ExpansionDecision::Kind::depth);
    auto d = decide_expansion(tax, "root", 9);
    CHECK(d.rho == 10);
    CHECK(d.rho_unmapped == 10);
    CHECK(d.delta == 9);

    // Non-leaf: width iff rho_unmapped > delta.
    auto kids = tax.add_children("root", {{"a", ""}});
    for (int i = 0; i < 4; ++i) tax.map_paper(kids[0], "p" + std::to_string(i));
    CHECK(tax.unmapped_density("root") == 6);
    CHECK(decide_expansion(tax, "root", 6).kind == ExpansionDecision::Kind::none);
    CHECK(decide_expansion(tax, "root", 5).kind == ExpansionDecision::Kind::width);
}

TEST_CASE("golden scenario recovers the planted structure with the expected trace") {
    Scenario sc = golden_scenario();
    Corpus corpus = corpus_of(sc);
    RunResult result = run_scenario(sc, corpus);

    const Taxonomy& tax = result.taxonomies.at(Dimension::task);
    CHECK(structure_of(tax) == sc.expected_structure());
    CHECK(tax.node_count() == 12);
    CHECK(result.queue_pops == 7);
    REQUIRE(result.trace_lines.size() == 7);

    auto line = [&](std::size_t i) { return json::parse(result.trace_lines[i]); };
    CHECK(line(0)["node"] == "natural_language_processing_tasks");
    CHECK(line(0)["kind"] == "width");
    CHECK(line(0)["rho"] == 60);
    CHECK(line(0)["rho_unmapped"] == 20);
    CHECK(line(0)["children_added"] == json::array({"summarization"}));
    for (std::size_t i : {1, 2, 3}) CHECK(line(i)["kind"] == "depth");
    CHECK(line(1)["node"] == "machine_translation");
    CHECK(line(2)["node"] == "question_answering");
    CHECK(line(3)["node"] == "summarization");
    for (std::size_t i : {4, 5, 6}) {
        CHECK(line(i)["kind"] == "none");
        CHECK(line(i)["rho_unmapped"] == 0);
    }
    CHECK(result.degraded_dimension.empty());
    CHECK(result.degraded_node.empty());
    CHECK(result.expansion_events.size() == 4);  // one width + three depth
}

TEST_CASE("planted recovery without grandchildren marks leaves exhausted") {
    Scenario sc = planted_recovery_scenario();
    Corpus corpus = corpus_of(sc);
    RunResult result = run_scenario(sc, corpus);

    const Taxonomy& tax = result.taxonomies.at(Dimension::task);
    CHECK(structure_of(tax) == sc.expected_structure());
    CHECK(tax.node_count() == 4);
    // Depth events fired but clustered to nothing: nodes are exhausted and
    // never re-enqueued.
    for (const auto& id : tax.node_order())
        if (id != tax.root_id()) CHECK(tax.node(id).expansion_exhausted);
    CHECK(result.queue_pops == 4);
}

TEST_CASE("below-threshold densities leave the initial taxonomy untouched") {
    Scenario sc;
    sc.delta = 50;  // nothing exceeds this
    sc.subtopics = {{"alpha", true, {"p01", "p02", "p03"}, {}},
                    {"beta", true, {"p04", "p05"}, {}}};
    Corpus corpus = corpus_of(sc);
    RunResult result = run_scenario(sc, corpus);
    const Taxonomy& tax = result.taxonomies.at(Dimension::task);
    CHECK(tax.node_count() == 3);
    CHECK(result.queue_pops == 1);
    json first = json::parse(result.trace_lines.at(0));
    CHECK(first["kind"] == "none");
    CHECK(first["skipped_descent"] == json::array());
}

TEST_CASE("dense children under a quiet parent are recorded as skipped descents") {
    Scenario sc;
    sc.delta = 5;
    // All papers land in initial children; no width signal at the root, but
    // both children are denser than delta.
    sc.subtopics = {{"alpha", true, {"p01", "p02", "p03", "p04", "p05", "p06"}, {}},
                    {"beta", true, {"p07", "p08", "p09", "p10", "p11", "p12"}, {}}};
    Corpus corpus = corpus_of(sc);
    RunResult result = run_scenario(sc, corpus);
    const Taxonomy& tax = result.taxonomies.at(Dimension::task);
    CHECK(tax.node_count() == 3);
    CHECK(result.queue_pops == 1);
    json first = json::parse(result.trace_lines.at(0));
    CHECK(first["kind"] == "none");
    CHECK(first["skipped_descent"] == json::array({"alpha", "beta"}));
}

TEST_CASE("randomized planted scenarios satisfy the run invariants") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        CAPTURE(seed);
        Scenario sc = random_scenario(seed);
        Corpus corpus = corpus_of(sc);
        RunResult result = run_scenario(sc, corpus);
        const Taxonomy& tax = result.taxonomies.at(Dimension::task);

        CHECK(structure_of(tax) == sc.expected_structure());
        CHECK(result.queue_pops <= 2 * static_cast<int>(tax.node_count()));
        CHECK(tax.is_acyclic());
        for (const auto& id : tax.node_order()) {
            CHECK(tax.level(id) <= sc.max_depth);
            for (const auto& cid : tax.node(id).children)
                for (const auto& pid : tax.node(cid).mapped_papers)
                    CHECK(tax.node(id).mapped_papers.count(pid) == 1);
            CHECK(tax.unmapped_density(id) >= 0);
            CHECK(tax.unmapped_density(id) <= tax.density(id));
        }
        // Task totality.
        CHECK(corpus.dimension_view(Dimension::task).size() == corpus.size());
    }
}

TEST_CASE("engine configuration is validated up front") {
    Corpus corpus("t", {{"p1", "T", "a", {}, ""}});
    Gateway gw(std::make_shared<ScriptedBackend>());
    PromptLibrary prompts = PromptLibrary::builtin();

    EngineConfig bad;
    bad.topic = "t";
    bad.dimensions = {Dimension::task};
    bad.delta = 0;
    CHECK_THROWS_AS(run_expansion(bad, corpus, gw, prompts), ConfigError);
    bad.delta = 1;
    bad.max_depth = 0;
    CHECK_THROWS_AS(run_expansion(bad, corpus, gw, prompts), ConfigError);
    bad.max_depth = 2;
    bad.dimensions.clear();
    CHECK_THROWS_AS(run_expansion(bad, corpus, gw, prompts), ConfigError);
}
