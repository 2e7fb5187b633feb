#include "taxoadapt/runner.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "taxoadapt/errors.hpp"
#include "taxoadapt/evaluation.hpp"
#include "taxoadapt/scripted_backend.hpp"

namespace taxoadapt {

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_file(path, j.dump(2) + "\n");
}

std::shared_ptr<Backend> make_backend(const std::string& kind,
                                      const std::optional<std::filesystem::path>& script,
                                      const LiveBackendConfig& live) {
    if (kind == "scripted") {
        if (!script) throw ConfigError("scripted backend requires --script");
        return std::make_shared<ScriptedBackend>(*script);
    }
    if (kind == "live") return std::make_shared<LiveBackend>(live);
    throw ConfigError("unknown backend: " + kind + " (expected scripted|live)");
}

PromptLibrary make_prompts(const std::optional<std::filesystem::path>& templates_file) {
    PromptLibrary prompts = PromptLibrary::builtin();
    if (templates_file) prompts.load_overrides(*templates_file);
    return prompts;
}

nlohmann::json dimension_names_json(const std::vector<Dimension>& dims) {
    nlohmann::json arr = nlohmann::json::array();
    for (Dimension d : dims) arr.push_back(std::string(dimension_name(d)));
    return arr;
}

}  // namespace

std::filesystem::path taxonomy_file(const std::filesystem::path& run_dir, Dimension dim) {
    return run_dir / ("taxonomy_" + std::string(dimension_name(dim)) + ".json");
}

std::filesystem::path run_build(const BuildConfig& config) {
    if (config.out_dir.empty()) throw ConfigError("output directory required");

    auto backend = make_backend(config.backend, config.script_file, config.live);
    PromptLibrary prompts = make_prompts(config.templates_file);

    std::filesystem::create_directories(config.out_dir);
    Gateway gateway(backend);
    gateway.set_ledger(config.out_dir / "ledger.jsonl");

    LoadResult loaded = load_corpus(config.corpus_path, config.topic);

    EngineConfig engine_config;
    engine_config.topic = config.topic;
    engine_config.dimensions = config.dimensions;
    engine_config.delta = config.delta;
    engine_config.max_depth = config.max_depth;
    engine_config.parallelism = config.parallelism;
    engine_config.min_cluster_size = config.min_cluster_size;
    engine_config.seed_taxonomy = config.seed_taxonomy;

    RunResult result = run_expansion(engine_config, loaded.corpus, gateway, prompts);

    // Artifacts.
    write_json(config.out_dir / "skipped_records.json", skip_report_json(loaded.skipped));
    write_json(config.out_dir / "corpus_classified.json", loaded.corpus.to_json());
    for (const auto& [dim, tax] : result.taxonomies)
        write_json(taxonomy_file(config.out_dir, dim), tax.to_json());

    std::ostringstream trace;
    for (const auto& line : result.trace_lines) trace << line << "\n";
    write_file(config.out_dir / "trace.jsonl", trace.str());

    std::ostringstream events;
    for (const auto& e : result.expansion_events) events << e.dump() << "\n";
    write_file(config.out_dir / "events.jsonl", events.str());

    nlohmann::json degraded{{"dimension_classification", nlohmann::json::array()},
                            {"node_classification", nlohmann::json::array()},
                            {"warnings", result.warnings}};
    for (const auto& d : result.degraded_dimension)
        degraded["dimension_classification"].push_back(
            {{"paper", d.paper_id}, {"reason", d.reason}});
    for (const auto& d : result.degraded_node)
        degraded["node_classification"].push_back(
            {{"node", d.node_id}, {"paper", d.paper_id}, {"reason", d.reason}});
    write_json(config.out_dir / "degraded.json", degraded);

    // The manifest records every effective parameter; the timestamp lives
    // here and nowhere else.
    nlohmann::json manifest{{"created_at", iso_timestamp()},
                            {"corpus", config.corpus_path.string()},
                            {"topic", config.topic},
                            {"dimensions", dimension_names_json(config.dimensions)},
                            {"delta", config.delta},
                            {"max_depth", config.max_depth},
                            {"backend", config.backend},
                            {"script", config.script_file ? config.script_file->string() : ""},
                            {"seed_taxonomy",
                             config.seed_taxonomy ? config.seed_taxonomy->string() : ""},
                            {"parallelism", config.parallelism},
                            {"min_cluster_size", config.min_cluster_size},
                            {"seed", config.seed},
                            {"queue_pops", result.queue_pops},
                            {"papers", loaded.corpus.size()},
                            {"skipped_records", loaded.skipped.size()}};
    write_json(config.out_dir / "manifest.json", manifest);

    return config.out_dir;
}

std::filesystem::path run_eval(const EvalConfig& config) {
    const auto manifest_path = config.run_dir / "manifest.json";
    std::ifstream mf(manifest_path);
    if (!mf) throw ConfigError("not a run directory (missing manifest): " +
                               config.run_dir.string());
    nlohmann::json manifest = nlohmann::json::parse(mf);

    std::ifstream cf(config.run_dir / "corpus_classified.json");
    if (!cf) throw ConfigError("run directory missing corpus_classified.json");
    Corpus corpus = Corpus::from_json(nlohmann::json::parse(cf));

    auto backend = make_backend(config.backend, config.script_file, config.live);
    PromptLibrary prompts = make_prompts(config.templates_file);
    Gateway judge(backend);

    const auto eval_dir = config.run_dir / "evaluation";
    std::filesystem::create_directories(eval_dir);
    judge.set_ledger(eval_dir / "judge_ledger.jsonl");

    std::vector<MetricReport> reports;
    for (const auto& dname : manifest.at("dimensions")) {
        Dimension dim = *parse_dimension(dname.get<std::string>());
        std::ifstream tf(taxonomy_file(config.run_dir, dim));
        if (!tf)
            throw ConfigError("run directory missing taxonomy for dimension " +
                              dname.get<std::string>());
        Taxonomy tax = Taxonomy::from_json(nlohmann::json::parse(tf));
        MetricReport report = evaluate_taxonomy(tax, corpus, judge, prompts, config.sample_size,
                                                config.seed, config.parallelism);
        std::ofstream out(eval_dir / ("report_" + dname.get<std::string>() + ".json"));
        out << report.to_json().dump(2) << "\n";
        reports.push_back(std::move(report));
    }

    nlohmann::json summary = cross_dimension_summary(reports);
    std::ofstream sj(eval_dir / "summary.json");
    sj << summary.dump(2) << "\n";
    std::ofstream st(eval_dir / "summary.txt");
    st << render_summary_table(summary);
    return eval_dir;
}

std::string run_export(const std::filesystem::path& run_dir, Dimension dim,
                       const std::string& format) {
    std::ifstream tf(taxonomy_file(run_dir, dim));
    if (!tf)
        throw ConfigError("no taxonomy for dimension " + std::string(dimension_name(dim)) +
                          " in " + run_dir.string());
    Taxonomy tax = Taxonomy::from_json(nlohmann::json::parse(tf));
    if (format == "json") return tax.to_json().dump(2) + "\n";
    if (format == "dot") return tax.to_dot();
    throw ConfigError("unknown export format: " + format + " (expected json|dot)");
}

std::string inspect_trace(const std::filesystem::path& run_dir) {
    std::ifstream in(run_dir / "trace.jsonl");
    if (!in) throw ConfigError("run directory has no trace.jsonl: " + run_dir.string());
    std::ostringstream out;
    std::string line;
    int i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        out << ++i << ". [" << j.value("dimension", "?") << "] " << j.value("node", "?") << ": "
            << j.value("kind", "?") << " (rho=" << j.value("rho", 0)
            << ", unmapped=" << j.value("rho_unmapped", 0) << ", delta=" << j.value("delta", 0)
            << ")";
        if (!j.value("children_added", nlohmann::json::array()).empty())
            out << " added=" << j["children_added"].dump();
        if (!j.value("skipped_descent", nlohmann::json::array()).empty())
            out << " skipped_descent=" << j["skipped_descent"].dump();
        out << "\n";
    }
    return out.str();
}

}  // namespace taxoadapt
