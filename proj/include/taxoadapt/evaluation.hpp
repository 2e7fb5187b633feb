#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taxoadapt/corpus.hpp"
#include "taxoadapt/gateway.hpp"
#include "taxoadapt/taxonomy.hpp"

namespace taxoadapt {

// One judged entity (a node, path, or sibling set) with its raw verdict.
struct JudgedItem {
    std::string item_id;
    double score = 0.0;  // raw verdict: binary 0/1 or scale {0,0.33,0.67,1}
    std::string rationale;
};

struct MetricResult {
    std::string name;
    bool defined = false;    // false when the taxonomy has nothing to judge
    double aggregate = 0.0;  // mean of item scores x 100
    std::vector<JudgedItem> items;
    std::vector<std::string> excluded;  // items the judge failed on
    nlohmann::json manifest = nlohmann::json::object();

    nlohmann::json to_json() const;
};

struct MetricReport {
    Dimension dimension;
    std::vector<MetricResult> metrics;

    nlohmann::json to_json() const;
    const MetricResult& metric(const std::string& name) const;
};

// Is each step of every root path strictly finer than its parent? 0/1 per
// non-root node's root path.
MetricResult path_granularity(const Taxonomy& tax, Gateway& judge, const PromptLibrary& prompts,
                              int parallelism = 4);

// Do each non-leaf's children share one level of granularity?
// Scale {0, 0.33, 0.67, 1} per child set.
MetricResult sibling_coherence(const Taxonomy& tax, Gateway& judge, const PromptLibrary& prompts,
                               int parallelism = 4);

// Is each node (root excluded) relevant to the taxonomy's dimension? 0/1.
MetricResult dimension_alignment(const Taxonomy& tax, const std::string& topic, Gateway& judge,
                                 const PromptLibrary& prompts, int parallelism = 4);

// Is each node relevant to at least 5% of the dimension's papers? Estimated
// over a fixed-seed sample of at most sample_size papers per node.
MetricResult paper_relevance(const Taxonomy& tax, const Corpus& corpus, Gateway& judge,
                             const PromptLibrary& prompts, int sample_size, std::uint64_t seed,
                             int parallelism = 4);

// Per non-leaf, the fraction of its relevant papers covered by (relevant to)
// at least one child.
MetricResult coverage(const Taxonomy& tax, const Corpus& corpus, Gateway& judge,
                      const PromptLibrary& prompts, int parallelism = 4);

// All five metrics for one taxonomy.
MetricReport evaluate_taxonomy(const Taxonomy& tax, const Corpus& corpus, Gateway& judge,
                               const PromptLibrary& prompts, int sample_size, std::uint64_t seed,
                               int parallelism = 4);

// Cross-dimension mean and population standard deviation per metric.
nlohmann::json cross_dimension_summary(const std::vector<MetricReport>& reports);

// Plain-text table of a summary produced by cross_dimension_summary.
std::string render_summary_table(const nlohmann::json& summary);

}  // namespace taxoadapt
