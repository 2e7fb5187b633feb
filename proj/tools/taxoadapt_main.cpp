#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "taxoadapt/errors.hpp"
#include "taxoadapt/runner.hpp"

namespace {

using taxoadapt::ExitCode;

// JSON config file supplying defaults; command-line flags win.
nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw taxoadapt::ConfigError("cannot read config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw taxoadapt::ConfigError("config file must be a JSON object: " + path);
    return j;
}

template <typename T>
void apply_config(const CLI::App& app, const std::string& flag, const nlohmann::json& config,
                  const std::string& key, T& target) {
    if (app.count(flag) == 0 && config.contains(key)) target = config[key].get<T>();
}

std::optional<std::filesystem::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"taxoadapt - corpus-grounded multidimensional taxonomy construction"};
    app.require_subcommand(1);

    std::string config_path;

    // ---- build ----
    auto* build = app.add_subcommand("build", "construct taxonomies from a corpus");
    std::string corpus, topic, dimensions_csv, backend = "scripted", script, seed_tax, templates,
                out_dir, model = "gpt-4o-mini", api_key_env = "TAXOADAPT_API_KEY";
    int delta = 40, max_depth = 2, parallelism = 4, min_cluster = 2;
    std::uint64_t seed = 17;
    build->add_option("--config", config_path, "JSON config file (flags override)");
    build->add_option("--corpus", corpus, "line-delimited JSON corpus file");
    build->add_option("--topic", topic, "root topic");
    build->add_option("--dimensions", dimensions_csv,
                      "comma-separated dimensions (default: all five)");
    build->add_option("--delta", delta, "density threshold");
    build->add_option("--max-depth", max_depth, "maximum taxonomy depth l");
    build->add_option("--backend", backend, "scripted|live");
    build->add_option("--script", script, "scripted-backend script file");
    build->add_option("--seed-taxonomy", seed_tax, "seed taxonomy file (skips the initial LLM call)");
    build->add_option("--templates", templates, "prompt template override file");
    build->add_option("--parallelism", parallelism, "max in-flight gateway requests");
    build->add_option("--min-cluster-size", min_cluster, "minimum papers per new child");
    build->add_option("--seed", seed, "sampling seed");
    build->add_option("--out", out_dir, "run directory to create");
    build->add_option("--model", model, "live backend model name");
    build->add_option("--api-key-env", api_key_env, "environment variable holding the API key");

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "run the five-metric judge suite on a run directory");
    std::string eval_run, eval_backend = "scripted", eval_script, eval_templates,
                eval_model = "gpt-4o-mini", eval_key_env = "TAXOADAPT_API_KEY";
    int sample_size = 100, eval_parallelism = 4;
    std::uint64_t eval_seed = 17;
    eval->add_option("--config", config_path, "JSON config file (flags override)");
    eval->add_option("--run", eval_run, "run directory")->required();
    eval->add_option("--backend", eval_backend, "scripted|live");
    eval->add_option("--script", eval_script, "scripted judge script file");
    eval->add_option("--templates", eval_templates, "prompt template override file");
    eval->add_option("--sample-size", sample_size, "papers sampled per node for relevance");
    eval->add_option("--seed", eval_seed, "sampling seed");
    eval->add_option("--parallelism", eval_parallelism, "max in-flight judge requests");
    eval->add_option("--model", eval_model, "live judge model name");
    eval->add_option("--api-key-env", eval_key_env, "environment variable holding the API key");

    // ---- export ----
    auto* exp = app.add_subcommand("export", "export a taxonomy as JSON or DOT");
    std::string exp_run, exp_format = "json", exp_dim = "task", exp_out;
    exp->add_option("--run", exp_run, "run directory")->required();
    exp->add_option("--format", exp_format, "json|dot");
    exp->add_option("--dimension", exp_dim, "dimension to export");
    exp->add_option("--out", exp_out, "output file (stdout when omitted)");

    // ---- inspect-trace ----
    auto* inspect = app.add_subcommand("inspect-trace", "print a run's decision trace");
    std::string ins_run;
    inspect->add_option("--run", ins_run, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (build->parsed()) {
        nlohmann::json cfg = load_config(config_path);
        apply_config(*build, "--corpus", cfg, "corpus", corpus);
        apply_config(*build, "--topic", cfg, "topic", topic);
        apply_config(*build, "--dimensions", cfg, "dimensions", dimensions_csv);
        apply_config(*build, "--delta", cfg, "delta", delta);
        apply_config(*build, "--max-depth", cfg, "max_depth", max_depth);
        apply_config(*build, "--backend", cfg, "backend", backend);
        apply_config(*build, "--script", cfg, "script", script);
        apply_config(*build, "--seed-taxonomy", cfg, "seed_taxonomy", seed_tax);
        apply_config(*build, "--templates", cfg, "templates", templates);
        apply_config(*build, "--parallelism", cfg, "parallelism", parallelism);
        apply_config(*build, "--min-cluster-size", cfg, "min_cluster_size", min_cluster);
        apply_config(*build, "--seed", cfg, "seed", seed);
        apply_config(*build, "--out", cfg, "out", out_dir);
        apply_config(*build, "--model", cfg, "model", model);

        if (corpus.empty() || topic.empty() || out_dir.empty())
            throw taxoadapt::ConfigError("build requires --corpus, --topic, and --out");
        if (delta < 1) throw taxoadapt::ConfigError("--delta must be >= 1");
        if (max_depth < 1) throw taxoadapt::ConfigError("--max-depth must be >= 1");
        if (parallelism < 1) throw taxoadapt::ConfigError("--parallelism must be >= 1");

        taxoadapt::BuildConfig bc;
        bc.corpus_path = corpus;
        bc.topic = topic;
        if (!dimensions_csv.empty()) {
            try {
                bc.dimensions = taxoadapt::parse_dimension_list(dimensions_csv);
            } catch (const std::invalid_argument& e) {
                throw taxoadapt::ConfigError(e.what());
            }
            if (bc.dimensions.empty()) throw taxoadapt::ConfigError("--dimensions is empty");
        }
        bc.delta = delta;
        bc.max_depth = max_depth;
        bc.backend = backend;
        bc.script_file = opt_path(script);
        bc.seed_taxonomy = opt_path(seed_tax);
        bc.templates_file = opt_path(templates);
        bc.parallelism = parallelism;
        bc.min_cluster_size = min_cluster;
        bc.seed = seed;
        bc.out_dir = out_dir;
        bc.live.model = model;
        bc.live.api_key_env = api_key_env;
        auto dir = taxoadapt::run_build(bc);
        std::cout << "run directory: " << dir.string() << "\n";
        return 0;
    }

    if (eval->parsed()) {
        nlohmann::json cfg = load_config(config_path);
        apply_config(*eval, "--backend", cfg, "backend", eval_backend);
        apply_config(*eval, "--script", cfg, "script", eval_script);
        apply_config(*eval, "--sample-size", cfg, "sample_size", sample_size);
        apply_config(*eval, "--seed", cfg, "seed", eval_seed);

        taxoadapt::EvalConfig ec;
        ec.run_dir = eval_run;
        ec.backend = eval_backend;
        ec.script_file = opt_path(eval_script);
        ec.templates_file = opt_path(eval_templates);
        ec.sample_size = sample_size;
        ec.seed = eval_seed;
        ec.parallelism = eval_parallelism;
        ec.live.model = eval_model;
        ec.live.api_key_env = eval_key_env;
        auto dir = taxoadapt::run_eval(ec);
        std::ifstream table(dir / "summary.txt");
        std::cout << table.rdbuf();
        std::cout << "evaluation written to: " << dir.string() << "\n";
        return 0;
    }

    if (exp->parsed()) {
        auto dim = taxoadapt::parse_dimension(exp_dim);
        if (!dim) throw taxoadapt::ConfigError("unknown dimension: " + exp_dim);
        std::string rendered = taxoadapt::run_export(exp_run, *dim, exp_format);
        if (exp_out.empty()) {
            std::cout << rendered;
        } else {
            std::ofstream out(exp_out, std::ios::binary);
            if (!out) throw taxoadapt::ConfigError("cannot write " + exp_out);
            out << rendered;
        }
        return 0;
    }

    if (inspect->parsed()) {
        std::cout << taxoadapt::inspect_trace(ins_run);
        return 0;
    }
    return static_cast<int>(ExitCode::internal_error);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const taxoadapt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::config_error);
    } catch (const taxoadapt::CorpusError& e) {
        std::cerr << "corpus error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::corpus_error);
    } catch (const taxoadapt::TransportError& e) {
        std::cerr << "gateway error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::gateway_fatal);
    } catch (const taxoadapt::ScriptMissError& e) {
        std::cerr << "gateway error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::gateway_fatal);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::internal_error);
    }
}
