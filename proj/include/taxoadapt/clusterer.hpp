#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taxoadapt/corpus.hpp"
#include "taxoadapt/gateway.hpp"
#include "taxoadapt/taxonomy.hpp"

namespace taxoadapt {

// One LLM-generated subtopic phrase for one paper at one expansion event.
struct PseudoLabel {
    std::string paper_id;
    std::string label;
    std::string context_node;
};

struct ClusterProposal {
    std::string label;
    std::string description;
    std::set<std::string> members;
};

// Dropped proposals / papers with reasons, for the expansion-event report.
struct ClusterDrop {
    std::string subject;
    std::string reason;
};

// Subtopic pseudo-label for one paper, one level finer than the node, phrased
// within the node's dimension. Nullopt (plus report entry) on gateway failure;
// the paper is excluded from this expansion event.
std::optional<PseudoLabel> pseudo_label(const Paper& p, const Taxonomy& tax,
                                        const std::string& node_id,
                                        ExpansionDecision::Kind kind, Gateway& gateway,
                                        const PromptLibrary& prompts,
                                        std::vector<ClusterDrop>* drops = nullptr);

// Parallel pseudo-labeling of all candidate papers for one expansion event.
std::vector<PseudoLabel> pseudo_label_batch(const std::vector<std::string>& paper_ids,
                                            const Corpus& corpus, const Taxonomy& tax,
                                            const std::string& node_id,
                                            ExpansionDecision::Kind kind, Gateway& gateway,
                                            const PromptLibrary& prompts, int parallelism,
                                            std::vector<ClusterDrop>* drops = nullptr);

// Groups pseudo-labels into granularity-consistent child proposals. Proposals
// are validated post-hoc: members must come from the input labels, clusters
// are non-overlapping (first cluster wins a contested paper), and labels may
// not collide with existing children. Lists longer than chunk_size are
// clustered per chunk and merged by a consolidation call.
std::vector<ClusterProposal> cluster(const std::vector<PseudoLabel>& labels, const Taxonomy& tax,
                                     const std::string& node_id, ExpansionDecision::Kind kind,
                                     Gateway& gateway, const PromptLibrary& prompts,
                                     std::vector<ClusterDrop>* drops = nullptr,
                                     std::size_t chunk_size = 200);

// Turns surviving proposals (>= min_size members) into children, pre-mapping
// each cluster's members. Returns new node ids; marks the node
// expansion-exhausted when nothing materializes.
std::vector<std::string> materialize(Taxonomy& tax, const std::string& node_id,
                                     const std::vector<ClusterProposal>& proposals, int min_size,
                                     std::vector<ClusterDrop>* drops = nullptr);

}  // namespace taxoadapt
