#include "taxoadapt/engine.hpp"

#include <deque>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

ExpansionDecision decide_expansion(const Taxonomy& tax, const std::string& node_id, int delta) {
    const TaxoNode& n = tax.node(node_id);
    ExpansionDecision d;
    d.node_id = node_id;
    d.delta = delta;
    d.rho = tax.density(node_id);
    d.rho_unmapped = tax.unmapped_density(node_id);
    if (n.is_leaf()) {
        if (d.rho > delta) d.kind = ExpansionDecision::Kind::depth;
    } else {
        if (d.rho_unmapped > delta) d.kind = ExpansionDecision::Kind::width;
    }
    return d;
}

namespace {

struct QueueEntry {
    Dimension dim;
    std::string node_id;
};

std::vector<std::string> sorted_unmapped(const Taxonomy& tax, const std::string& node_id) {
    const TaxoNode& n = tax.node(node_id);
    std::set<std::string> covered;
    for (const auto& c : n.children) {
        const auto& cp = tax.node(c).mapped_papers;
        covered.insert(cp.begin(), cp.end());
    }
    std::vector<std::string> out;
    for (const auto& p : n.mapped_papers)
        if (!covered.count(p)) out.push_back(p);
    return out;
}

// One depth or width expansion event: pseudo-label, cluster, materialize,
// enrich the new children. Returns the new node ids.
std::vector<std::string> expand(Taxonomy& tax, Corpus& corpus, const std::string& node_id,
                                ExpansionDecision::Kind kind, const EngineConfig& config,
                                Gateway& gateway, const PromptLibrary& prompts,
                                RunResult& result) {
    std::vector<std::string> candidates;
    if (kind == ExpansionDecision::Kind::depth) {
        const auto& mapped = tax.node(node_id).mapped_papers;
        candidates.assign(mapped.begin(), mapped.end());
    } else {
        candidates = sorted_unmapped(tax, node_id);
    }

    std::vector<ClusterDrop> drops;
    std::vector<PseudoLabel> labels = pseudo_label_batch(
        candidates, corpus, tax, node_id, kind, gateway, prompts, config.parallelism, &drops);

    std::vector<ClusterProposal> proposals;
    if (!labels.empty())
        proposals = cluster(labels, tax, node_id, kind, gateway, prompts, &drops);

    std::vector<std::string> added =
        materialize(tax, node_id, proposals, config.min_cluster_size, &drops);

    for (const auto& nid : added)
        enrich_node(tax, nid, config.topic, gateway, prompts, config.enrich_keywords,
                    &result.degraded_node);

    nlohmann::json jlabels = nlohmann::json::array();
    for (const auto& pl : labels)
        jlabels.push_back({{"paper", pl.paper_id}, {"label", pl.label}});
    nlohmann::json jproposals = nlohmann::json::array();
    for (const auto& p : proposals)
        jproposals.push_back(
            {{"label", p.label},
             {"members", std::vector<std::string>(p.members.begin(), p.members.end())}});
    nlohmann::json jdrops = nlohmann::json::array();
    for (const auto& d : drops) jdrops.push_back({{"subject", d.subject}, {"reason", d.reason}});
    result.expansion_events.push_back(
        {{"node", node_id},
         {"dimension", std::string(dimension_name(tax.dimension()))},
         {"kind", std::string(expansion_kind_name(kind))},
         {"pseudo_labels", jlabels},
         {"proposals", jproposals},
         {"drops", jdrops},
         {"added", added}});
    return added;
}

void emit_trace(RunResult& result, const Taxonomy& tax, const ExpansionDecision& d,
                const std::vector<std::string>& children_added,
                const std::vector<std::string>& skipped_descent) {
    std::vector<std::string> added_labels;
    for (const auto& id : children_added) added_labels.push_back(tax.node(id).label);
    nlohmann::json line{{"node", d.node_id},
                        {"dimension", std::string(dimension_name(tax.dimension()))},
                        {"kind", std::string(expansion_kind_name(d.kind))},
                        {"rho", d.rho},
                        {"rho_unmapped", d.rho_unmapped},
                        {"delta", d.delta},
                        {"children_added", added_labels},
                        {"skipped_descent", skipped_descent}};
    result.trace_lines.push_back(line.dump());
}

}  // namespace

RunResult run_expansion(const EngineConfig& config, Corpus& corpus, Gateway& gateway,
                        const PromptLibrary& prompts) {
    if (config.delta < 1) throw ConfigError("delta must be >= 1");
    if (config.max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (config.dimensions.empty()) throw ConfigError("at least one dimension required");

    RunResult result;
    result.taxonomies = init_taxonomies(config.topic, config.dimensions, gateway, prompts,
                                        config.max_depth, config.seed_taxonomy,
                                        &result.warnings);

    auto views = partition_corpus(corpus, config.dimensions, gateway, prompts,
                                  config.parallelism, &result.degraded_dimension);

    // Every dimension-relevant paper starts mapped to that dimension's root.
    for (Dimension d : config.dimensions) {
        Taxonomy& tax = result.taxonomies.at(d);
        std::set<std::string> ids;
        for (const Paper* p : views.at(d)) ids.insert(p->id);
        tax.set_mapped_papers(tax.root_id(), std::move(ids));
        for (const auto& cid : tax.node(tax.root_id()).children)
            enrich_node(tax, cid, config.topic, gateway, prompts, config.enrich_keywords,
                        &result.degraded_node);
    }

    std::deque<QueueEntry> queue;
    for (Dimension d : config.dimensions)
        queue.push_back({d, result.taxonomies.at(d).root_id()});

    while (!queue.empty()) {
        QueueEntry entry = queue.front();
        queue.pop_front();
        ++result.queue_pops;
        Taxonomy& tax = result.taxonomies.at(entry.dim);

        if (tax.node(entry.node_id).is_leaf()) {
            ExpansionDecision decision = decide_expansion(tax, entry.node_id, config.delta);
            std::vector<std::string> added;
            if (decision.kind == ExpansionDecision::Kind::depth &&
                !tax.node(entry.node_id).expansion_exhausted &&
                tax.level(entry.node_id) < config.max_depth) {
                added = expand(tax, corpus, entry.node_id, ExpansionDecision::Kind::depth,
                               config, gateway, prompts, result);
                // A leaf that gained children is revisited as a non-leaf;
                // an exhausted one is never re-enqueued (no livelock).
                if (!added.empty()) queue.push_back(entry);
            }
            emit_trace(result, tax, decision, added, {});
            continue;
        }

        // Non-leaf: classify papers down one level, then evaluate the width
        // signal on the refreshed densities.
        map_level(tax, corpus, entry.node_id, gateway, prompts, config.parallelism,
                  &result.degraded_node);
        ExpansionDecision decision = decide_expansion(tax, entry.node_id, config.delta);

        std::vector<std::string> added;
        std::vector<std::string> skipped_descent;
        if (decision.kind == ExpansionDecision::Kind::width) {
            added = expand(tax, corpus, entry.node_id, ExpansionDecision::Kind::width, config,
                           gateway, prompts, result);
            if (!added.empty())
                map_level(tax, corpus, entry.node_id, gateway, prompts, config.parallelism,
                          &result.degraded_node);
            for (const auto& cid : tax.node(entry.node_id).children) {
                if (tax.level(cid) < config.max_depth && tax.density(cid) > config.delta)
                    queue.push_back({entry.dim, cid});
            }
        } else {
            // Literal pseudocode: descent happens only inside the width
            // branch. Dense children skipped here are recorded for audit.
            for (const auto& cid : tax.node(entry.node_id).children) {
                if (tax.level(cid) < config.max_depth && tax.density(cid) > config.delta)
                    skipped_descent.push_back(cid);
            }
        }
        emit_trace(result, tax, decision, added, skipped_descent);
    }

    return result;
}

}  // namespace taxoadapt
