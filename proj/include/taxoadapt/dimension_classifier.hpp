#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "taxoadapt/corpus.hpp"
#include "taxoadapt/dimensions.hpp"
#include "taxoadapt/gateway.hpp"

namespace taxoadapt {

struct DegradedPaper {
    std::string paper_id;
    std::string reason;
};

// Multi-label classification of one paper into contributing dimensions.
// The returned set always contains task; on structured-output failure the
// paper degrades to {task} and the failure is reported.
std::set<Dimension> classify_dimensions(const Paper& p, const std::vector<Dimension>& dims,
                                        Gateway& gateway, const PromptLibrary& prompts,
                                        std::vector<DegradedPaper>* degraded = nullptr);

// Classifies the whole corpus (bounded parallelism), persists each paper's
// dimensions field, and returns the per-dimension views. P_task == P always.
std::map<Dimension, std::vector<const Paper*>> partition_corpus(
    Corpus& corpus, const std::vector<Dimension>& dims, Gateway& gateway,
    const PromptLibrary& prompts, int parallelism,
    std::vector<DegradedPaper>* degraded = nullptr);

}  // namespace taxoadapt
