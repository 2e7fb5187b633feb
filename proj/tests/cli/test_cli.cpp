#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "support/scenario.hpp"
#include "support/tempdir.hpp"
#include "taxoadapt/taxonomy.hpp"

using namespace taxoadapt;
using namespace taxoadapt::testing;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TAXOADAPT_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

struct CliFixture {
    TempDir dir{"cli"};
    Scenario sc = golden_scenario();
    std::filesystem::path corpus = sc.write_corpus(dir.path());
    std::filesystem::path script = sc.write_script(dir.path());
    std::filesystem::path run = dir / "run";

    std::string build_args() const {
        return "build --corpus " + q(corpus) + " --topic '" + sc.topic +
               "' --dimensions task --delta 15 --backend scripted --script " + q(script) +
               " --out " + q(run);
    }
};

}  // namespace

TEST_CASE("build writes a complete run directory") {
    CliFixture f;
    REQUIRE(run_cli(f.build_args()) == 0);
    for (const char* name : {"manifest.json", "corpus_classified.json", "taxonomy_task.json",
                             "trace.jsonl", "events.jsonl", "ledger.jsonl", "degraded.json",
                             "skipped_records.json"})
        CHECK(std::filesystem::exists(f.run / name));

    json manifest = json::parse(slurp(f.run / "manifest.json"));
    CHECK(manifest["delta"] == 15);
    CHECK(manifest["papers"] == 60);
    CHECK(manifest["queue_pops"] == 7);
    CHECK(manifest["dimensions"] == json::array({"task"}));

    Taxonomy tax = Taxonomy::from_json(json::parse(slurp(f.run / "taxonomy_task.json")));
    CHECK(structure_of(tax) == f.sc.expected_structure());
}

TEST_CASE("eval, export, and inspect-trace consume a run directory") {
    CliFixture f;
    REQUIRE(run_cli(f.build_args()) == 0);
    Taxonomy tax = Taxonomy::from_json(json::parse(slurp(f.run / "taxonomy_task.json")));

    auto judge = f.dir.write("judge.json", judge_script(tax, f.sc.paper_ids()).dump());
    CHECK(run_cli("eval --run " + q(f.run) + " --backend scripted --script " + q(judge)) == 0);
    CHECK(std::filesystem::exists(f.run / "evaluation" / "summary.json"));
    CHECK(std::filesystem::exists(f.run / "evaluation" / "summary.txt"));
    CHECK(std::filesystem::exists(f.run / "evaluation" / "report_task.json"));
    CHECK(std::filesystem::exists(f.run / "evaluation" / "judge_ledger.jsonl"));
    json summary = json::parse(slurp(f.run / "evaluation" / "summary.json"));
    CHECK(summary["coverage"]["mean"] == doctest::Approx(100.0));  // all-yes judge

    auto exported = f.dir / "tax.dot";
    CHECK(run_cli("export --run " + q(f.run) + " --dimension task --format dot --out " +
                  q(exported)) == 0);
    CHECK(slurp(exported).find("digraph taxonomy") != std::string::npos);
    CHECK(run_cli("export --run " + q(f.run) + " --dimension task --format json") == 0);
    CHECK(run_cli("export --run " + q(f.run) + " --dimension task --format yaml") == 2);

    CHECK(run_cli("inspect-trace --run " + q(f.run)) == 0);
    CHECK(run_cli("inspect-trace --run " + q(f.dir / "nowhere")) == 2);
}

TEST_CASE("config file supplies defaults but flags win") {
    CliFixture f;
    auto config = f.dir.write("config.json",
                              json{{"corpus", f.corpus.string()},
                                   {"topic", f.sc.topic},
                                   {"dimensions", "task"},
                                   {"delta", 999},
                                   {"script", f.script.string()},
                                   {"out", (f.dir / "run_cfg").string()}}
                                  .dump());
    REQUIRE(run_cli("build --config " + q(config) + " --delta 15") == 0);
    json manifest = json::parse(slurp(f.dir / "run_cfg" / "manifest.json"));
    CHECK(manifest["delta"] == 15);  // flag overrides config
    CHECK(manifest["topic"] == f.sc.topic);
}

TEST_CASE("failure classes map to distinct exit codes") {
    CliFixture f;
    auto base = [&](const std::string& extra) {
        return "build --corpus " + q(f.corpus) + " --topic '" + f.sc.topic + "' --script " +
               q(f.script) + " --out " + q(f.dir / "r_fail") + " " + extra;
    };
    // Config errors.
    CHECK(run_cli("build --topic t --out x") == 2);  // missing --corpus
    CHECK(run_cli(base("--delta 0")) == 2);
    CHECK(run_cli(base("--dimensions bogus")) == 2);
    CHECK(run_cli(base("--backend carrier_pigeon")) == 2);
    CHECK(run_cli("build --corpus " + q(f.corpus) + " --topic t --backend scripted --out " +
                  q(f.dir / "r2")) == 2);  // scripted without --script

    // Corpus errors.
    CHECK(run_cli("build --corpus " + q(f.dir / "missing.jsonl") + " --topic t --script " +
                  q(f.script) + " --out " + q(f.dir / "r3")) == 3);

    // Gateway-fatal: a script with no entries misses immediately.
    auto empty = f.dir.write("empty.json", R"({"entries": []})");
    CHECK(run_cli("build --corpus " + q(f.corpus) + " --topic '" + f.sc.topic +
                  "' --dimensions task --script " + q(empty) + " --out " +
                  q(f.dir / "r4")) == 4);
}
