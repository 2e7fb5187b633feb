#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxoadapt/clusterer.hpp"
#include "taxoadapt/corpus.hpp"
#include "taxoadapt/dimension_classifier.hpp"
#include "taxoadapt/gateway.hpp"
#include "taxoadapt/node_classifier.hpp"
#include "taxoadapt/taxonomy.hpp"

namespace taxoadapt {

struct EngineConfig {
    std::string topic;
    std::vector<Dimension> dimensions;
    int delta = 40;      // density threshold gating both expansion kinds
    int max_depth = 2;   // l; root is level 0
    int parallelism = 4;
    int min_cluster_size = 2;
    int enrich_keywords = 5;
    std::optional<std::filesystem::path> seed_taxonomy;
};

// Signal evaluation. Strict '>' guards on both kinds, following the
// executable pseudocode rather than the looser prose reading.
ExpansionDecision decide_expansion(const Taxonomy& tax, const std::string& node_id, int delta);

struct RunResult {
    std::map<Dimension, Taxonomy> taxonomies;
    // One canonical JSON line per queue pop (the decision trace).
    std::vector<std::string> trace_lines;
    // One JSON object per expansion event: inputs, proposals, drops.
    std::vector<nlohmann::json> expansion_events;
    std::vector<DegradedPaper> degraded_dimension;
    std::vector<DegradedClassification> degraded_node;
    std::vector<std::string> warnings;
    int queue_pops = 0;
};

// The queue-driven classify -> signal -> expand loop over all dimensions.
// Sequential over queue entries; fan-out happens inside gateway batches.
RunResult run_expansion(const EngineConfig& config, Corpus& corpus, Gateway& gateway,
                        const PromptLibrary& prompts);

}  // namespace taxoadapt
