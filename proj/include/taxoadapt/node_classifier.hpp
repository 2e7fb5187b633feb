#pragma once

#include <set>
#include <string>
#include <vector>

#include "taxoadapt/corpus.hpp"
#include "taxoadapt/gateway.hpp"
#include "taxoadapt/taxonomy.hpp"

namespace taxoadapt {

struct DegradedClassification {
    std::string node_id;
    std::string paper_id;
    std::string reason;
};

// Generates k keywords for a node in the context of its ancestor path and
// dimension. Idempotent: a node that already has keywords is left unchanged.
// Gateway failure leaves keywords empty and reports it.
void enrich_node(Taxonomy& tax, const std::string& node_id, const std::string& topic,
                 Gateway& gateway, const PromptLibrary& prompts, int k = 5,
                 std::vector<DegradedClassification>* degraded = nullptr);

// Multi-label classification of one paper onto a node's children.
// Empty result means the paper stays unmapped at this level.
std::set<std::string> classify_to_children(const Paper& p, const Taxonomy& tax,
                                           const std::string& node_id, Gateway& gateway,
                                           const PromptLibrary& prompts,
                                           std::vector<DegradedClassification>* degraded = nullptr);

// Classifies every paper mapped to n onto n's children (bounded parallelism)
// and merges the results into the children's mapped sets. Child sets stay
// subsets of the parent's by construction.
void map_level(Taxonomy& tax, Corpus& corpus, const std::string& node_id, Gateway& gateway,
               const PromptLibrary& prompts, int parallelism,
               std::vector<DegradedClassification>* degraded = nullptr);

}  // namespace taxoadapt
