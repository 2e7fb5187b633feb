#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taxoadapt/dimensions.hpp"
#include "taxoadapt/engine.hpp"
#include "taxoadapt/live_backend.hpp"

namespace taxoadapt {

struct BuildConfig {
    std::filesystem::path corpus_path;
    std::string topic;
    std::vector<Dimension> dimensions = {kAllDimensions.begin(), kAllDimensions.end()};
    int delta = 40;
    int max_depth = 2;
    std::string backend = "scripted";  // "scripted" | "live"
    std::optional<std::filesystem::path> script_file;
    std::optional<std::filesystem::path> seed_taxonomy;
    std::optional<std::filesystem::path> templates_file;
    int parallelism = 4;
    int min_cluster_size = 2;
    std::uint64_t seed = 17;
    std::filesystem::path out_dir;
    LiveBackendConfig live;
};

struct EvalConfig {
    std::filesystem::path run_dir;
    std::string backend = "scripted";
    std::optional<std::filesystem::path> script_file;
    std::optional<std::filesystem::path> templates_file;
    int sample_size = 100;
    std::uint64_t seed = 17;
    int parallelism = 4;
    LiveBackendConfig live;
};

// Full pipeline: load corpus, run the expansion loop, write the run
// directory (taxonomies, decision trace, expansion events, call ledger,
// skipped-records report, manifest). Returns the run directory path.
std::filesystem::path run_build(const BuildConfig& config);

// Five-metric judge suite over every taxonomy in a run directory; writes
// per-dimension reports plus a cross-dimension summary.
std::filesystem::path run_eval(const EvalConfig& config);

// Exports one dimension's taxonomy as canonical JSON or DOT.
std::string run_export(const std::filesystem::path& run_dir, Dimension dim,
                       const std::string& format);

// Human-readable rendering of a run's decision trace.
std::string inspect_trace(const std::filesystem::path& run_dir);

std::filesystem::path taxonomy_file(const std::filesystem::path& run_dir, Dimension dim);

}  // namespace taxoadapt
