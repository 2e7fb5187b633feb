#include <doctest.h>

#include <memory>

#include "support/tempdir.hpp"
#include "taxoadapt/errors.hpp"
#include "taxoadapt/gateway.hpp"
#include "taxoadapt/scripted_backend.hpp"

using namespace taxoadapt;
using taxoadapt::testing::TempDir;
using taxoadapt::testing::slurp;
using nlohmann::json;

namespace {

CompletionRequest keywords_request(const std::string& node) {
    CompletionRequest req;
    req.prompt_id = "enrich_node";
    req.schema_id = "keywords";
    req.messages = {{"user", "keywords please"}};
    req.key = {{"node", node}, {"dimension", "task"}};
    return req;
}

}  // namespace

TEST_CASE("structured completion parses and validates on the first attempt") {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->add("enrich_node", {{"node", "n"}, {"dimension", "task"}},
                 json{{"keywords", {"a", "b"}}});
    Gateway gw(backend);
    CompletionResult res = gw.complete_structured(keywords_request("n"));
    CHECK(res.attempts == 1);
    CHECK(res.backend_tag == "scripted");
    CHECK(res.parsed["keywords"] == json({"a", "b"}));
}

TEST_CASE("invalid output triggers repair retries until a valid reply") {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->add_sequence("enrich_node", {{"node", "n"}, {"dimension", "task"}},
                          {"total garbage",
                           R"({"keywords": [1, 2]})",
                           "```json\n{\"keywords\": [\"fixed\"]}\n```"});
    Gateway gw(backend);
    CompletionResult res = gw.complete_structured(keywords_request("n"));
    CHECK(res.attempts == 3);
    CHECK(res.parsed["keywords"] == json({"fixed"}));
}

TEST_CASE("exhausted retries raise a structured-output error with the last raw text") {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->add_raw("enrich_node", {{"node", "n"}, {"dimension", "task"}}, "still not json");
    Gateway gw(backend);
    auto req = keywords_request("n");
    req.max_retries = 1;
    try {
        gw.complete_structured(req);
        FAIL("expected StructuredOutputError");
    } catch (const StructuredOutputError& e) {
        CHECK(e.attempts == 2);  // max_retries + 1
        CHECK(e.last_raw_text == "still not json");
    }
}

TEST_CASE("script misses and unknown schemas are hard errors") {
    auto backend = std::make_shared<ScriptedBackend>();
    Gateway gw(backend);
    CHECK_THROWS_AS(gw.complete_structured(keywords_request("n")), ScriptMissError);

    auto req = keywords_request("n");
    req.schema_id = "no_such_schema";
    CHECK_THROWS_AS(gw.complete_structured(req), ConfigError);
}

TEST_CASE("batch preserves order, isolates failures, and bounds parallelism") {
    auto backend = std::make_shared<ScriptedBackend>();
    const int n = 24;
    for (int i = 0; i < n; ++i) {
        if (i == 7) continue;  // scripted miss for one member
        backend->add("enrich_node", {{"node", "n" + std::to_string(i)}, {"dimension", "task"}},
                     json{{"keywords", {"kw" + std::to_string(i)}}});
    }
    Gateway gw(backend);
    std::vector<CompletionRequest> reqs;
    for (int i = 0; i < n; ++i) reqs.push_back(keywords_request("n" + std::to_string(i)));

    auto items = gw.complete_batch(reqs, 3);
    REQUIRE(items.size() == n);
    for (int i = 0; i < n; ++i) {
        if (i == 7) {
            CHECK_FALSE(items[i].ok());
            CHECK(items[i].error.find("no script entry") != std::string::npos);
        } else {
            REQUIRE(items[i].ok());
            CHECK(items[i].result->parsed["keywords"][0] == "kw" + std::to_string(i));
        }
    }
    CHECK(backend->peak_in_flight() <= 3);
    CHECK(backend->peak_in_flight() >= 2);  // workers actually overlapped
}

TEST_CASE("ledger lines are appended in request order regardless of scheduling") {
    TempDir dir("ledger");
    auto run_once = [&](const std::string& name) {
        auto backend = std::make_shared<ScriptedBackend>();
        std::vector<CompletionRequest> reqs;
        for (int i = 0; i < 16; ++i) {
            backend->add("enrich_node", {{"node", "n" + std::to_string(i)}, {"dimension", "task"}},
                         json{{"keywords", {"k"}}});
            reqs.push_back(keywords_request("n" + std::to_string(i)));
        }
        Gateway gw(backend);
        gw.set_ledger(dir / name);
        gw.complete_batch(reqs, 4);
        gw.complete_structured(keywords_request("n0"));
        return slurp(dir / name);
    };
    std::string a = run_once("a.jsonl");
    std::string b = run_once("b.jsonl");
    CHECK(a == b);

    // One line per call, each valid JSON with the bookkeeping fields.
    std::istringstream in(a);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        ++count;
        json j = json::parse(line);
        CHECK(j["prompt_id"] == "enrich_node");
        CHECK(j["attempts"] == 1);
        CHECK(j["ok"] == true);
        CHECK(j["backend"] == "scripted");
        CHECK(j["prompt_chars"].get<int>() > 0);
    }
    CHECK(count == 17);
}

TEST_CASE("failed calls still land in the ledger") {
    TempDir dir("ledger");
    auto backend = std::make_shared<ScriptedBackend>();
    backend->add_raw("enrich_node", {{"node", "n"}, {"dimension", "task"}}, "junk");
    Gateway gw(backend);
    gw.set_ledger(dir / "l.jsonl");
    auto req = keywords_request("n");
    req.max_retries = 0;
    CHECK_THROWS_AS(gw.complete_structured(req), StructuredOutputError);
    json j = json::parse(slurp(dir / "l.jsonl"));
    CHECK(j["ok"] == false);
    CHECK(j["attempts"] == 1);
}

TEST_CASE("sequenced script entries repeat their final response") {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->add_sequence("enrich_node", {{"node", "n"}, {"dimension", "task"}},
                          {R"({"keywords": ["first"]})", R"({"keywords": ["later"]})"});
    Gateway gw(backend);
    CHECK(gw.complete_structured(keywords_request("n")).parsed["keywords"][0] == "first");
    CHECK(gw.complete_structured(keywords_request("n")).parsed["keywords"][0] == "later");
    CHECK(gw.complete_structured(keywords_request("n")).parsed["keywords"][0] == "later");
}

TEST_CASE("script export reloads to an equivalent backend") {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->add("enrich_node", {{"node", "n"}, {"dimension", "task"}},
                 json{{"keywords", {"a"}}});
    auto clone = std::make_shared<ScriptedBackend>(backend->script());
    Gateway gw(clone);
    CHECK(gw.complete_structured(keywords_request("n")).parsed["keywords"][0] == "a");
}
