#include "taxoadapt/clusterer.hpp"

#include <algorithm>
#include <sstream>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string existing_children_text(const Taxonomy& tax, const TaxoNode& n) {
    auto labels = tax.child_labels(n.id);
    if (labels.empty()) return "(none)";
    return join({labels.begin(), labels.end()}, ", ");
}

CompletionRequest make_cluster_request(const std::vector<PseudoLabel>& labels,
                                       const Taxonomy& tax, const TaxoNode& n,
                                       ExpansionDecision::Kind kind,
                                       const PromptLibrary& prompts) {
    std::ostringstream block;
    for (const auto& pl : labels) block << pl.paper_id << ": " << pl.label << "\n";

    const PromptTemplate& tmpl = prompts.get("cluster_subtopics");
    CompletionRequest req;
    req.prompt_id = tmpl.id;
    req.schema_id = tmpl.schema_id;
    req.messages = PromptLibrary::render(
        tmpl, {{"node_label", n.label},
               {"dimension", std::string(dimension_name(n.dimension))},
               {"ancestor_path", join(tax.ancestor_path(n.id), " -> ")},
               {"existing_children", existing_children_text(tax, n)},
               {"pseudo_labels", block.str()}});
    req.key = {{"node", n.label}, {"kind", std::string(expansion_kind_name(kind))}};
    return req;
}

CompletionRequest make_pseudo_request(const Paper& p, const Taxonomy& tax, const TaxoNode& n,
                                      ExpansionDecision::Kind kind,
                                      const PromptLibrary& prompts) {
    const PromptTemplate& tmpl = prompts.get("pseudo_label");
    CompletionRequest req;
    req.prompt_id = tmpl.id;
    req.schema_id = tmpl.schema_id;
    req.messages = PromptLibrary::render(
        tmpl, {{"node_label", n.label},
               {"node_description", n.description},
               {"dimension", std::string(dimension_name(n.dimension))},
               {"ancestor_path", join(tax.ancestor_path(n.id), " -> ")},
               {"existing_children", existing_children_text(tax, n)},
               {"title", p.title},
               {"abstract", p.abstract_text}});
    req.key = {{"paper", p.id},
               {"node", n.label},
               {"kind", std::string(expansion_kind_name(kind))}};
    return req;
}

std::vector<ClusterProposal> parse_proposals(const nlohmann::json& parsed) {
    std::vector<ClusterProposal> out;
    for (const auto& c : parsed.at("clusters")) {
        ClusterProposal p;
        p.label = c.at("label").get<std::string>();
        p.description = c.at("description").get<std::string>();
        for (const auto& m : c.at("members")) p.members.insert(m.get<std::string>());
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::optional<PseudoLabel> pseudo_label(const Paper& p, const Taxonomy& tax,
                                        const std::string& node_id,
                                        ExpansionDecision::Kind kind, Gateway& gateway,
                                        const PromptLibrary& prompts,
                                        std::vector<ClusterDrop>* drops) {
    const TaxoNode& n = tax.node(node_id);
    try {
        CompletionResult res =
            gateway.complete_structured(make_pseudo_request(p, tax, n, kind, prompts));
        return PseudoLabel{p.id, res.parsed.at("label").get<std::string>(), node_id};
    } catch (const StructuredOutputError& e) {
        if (drops) drops->push_back({p.id, std::string("pseudo-label failed: ") + e.what()});
        return std::nullopt;
    }
}

std::vector<PseudoLabel> pseudo_label_batch(const std::vector<std::string>& paper_ids,
                                            const Corpus& corpus, const Taxonomy& tax,
                                            const std::string& node_id,
                                            ExpansionDecision::Kind kind, Gateway& gateway,
                                            const PromptLibrary& prompts, int parallelism,
                                            std::vector<ClusterDrop>* drops) {
    const TaxoNode& n = tax.node(node_id);
    std::vector<CompletionRequest> reqs;
    reqs.reserve(paper_ids.size());
    for (const auto& pid : paper_ids)
        reqs.push_back(make_pseudo_request(corpus.by_id(pid), tax, n, kind, prompts));

    std::vector<BatchItem> items = gateway.complete_batch(reqs, parallelism);
    std::vector<PseudoLabel> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].ok()) {
            out.push_back({paper_ids[i], items[i].result->parsed.at("label").get<std::string>(),
                           node_id});
        } else if (drops) {
            drops->push_back({paper_ids[i], "pseudo-label failed: " + items[i].error});
        }
    }
    return out;
}

std::vector<ClusterProposal> cluster(const std::vector<PseudoLabel>& labels, const Taxonomy& tax,
                                     const std::string& node_id, ExpansionDecision::Kind kind,
                                     Gateway& gateway, const PromptLibrary& prompts,
                                     std::vector<ClusterDrop>* drops, std::size_t chunk_size) {
    if (labels.empty()) throw TaxonomyError("cluster requires a non-empty label list");
    const TaxoNode& n = tax.node(node_id);

    std::vector<ClusterProposal> raw;
    try {
        if (labels.size() <= chunk_size) {
            CompletionResult res = gateway.complete_structured(
                make_cluster_request(labels, tax, n, kind, prompts));
            raw = parse_proposals(res.parsed);
        } else {
            // Context overflow: cluster per chunk, then merge by consolidation.
            nlohmann::json chunk_lists = nlohmann::json::array();
            for (std::size_t start = 0; start < labels.size(); start += chunk_size) {
                std::vector<PseudoLabel> chunk(
                    labels.begin() + start,
                    labels.begin() + std::min(labels.size(), start + chunk_size));
                CompletionResult res = gateway.complete_structured(
                    make_cluster_request(chunk, tax, n, kind, prompts));
                chunk_lists.push_back(res.parsed);
            }
            const PromptTemplate& tmpl = prompts.get("consolidate_clusters");
            CompletionRequest req;
            req.prompt_id = tmpl.id;
            req.schema_id = tmpl.schema_id;
            req.messages =
                PromptLibrary::render(tmpl, {{"cluster_lists", chunk_lists.dump(2)}});
            req.key = {{"node", n.label}, {"kind", std::string(expansion_kind_name(kind))}};
            raw = parse_proposals(gateway.complete_structured(req).parsed);
        }
    } catch (const StructuredOutputError& e) {
        if (drops) drops->push_back({node_id, std::string("clustering failed: ") + e.what()});
        return {};
    }

    // Post-filters: membership provenance, non-overlap, label uniqueness
    // against existing children and among proposals.
    std::set<std::string> input_papers;
    for (const auto& pl : labels) input_papers.insert(pl.paper_id);

    std::set<std::string> taken_labels = tax.child_labels(node_id);
    std::set<std::string> assigned;
    std::vector<ClusterProposal> out;
    for (auto& p : raw) {
        const std::string norm = Taxonomy::normalize_label(p.label);
        if (norm.empty()) {
            if (drops) drops->push_back({p.label, "empty label after normalization"});
            continue;
        }
        if (taken_labels.count(norm)) {
            if (drops) drops->push_back({norm, "duplicates an existing sibling label"});
            continue;
        }
        ClusterProposal kept;
        kept.label = norm;
        kept.description = p.description;
        for (const auto& m : p.members) {
            if (!input_papers.count(m)) {
                if (drops) drops->push_back({m, "member not in the input label set"});
                continue;
            }
            if (assigned.count(m)) {
                if (drops) drops->push_back({m, "already assigned to an earlier cluster"});
                continue;
            }
            kept.members.insert(m);
        }
        if (kept.members.empty()) {
            if (drops) drops->push_back({norm, "no valid members after filtering"});
            continue;
        }
        assigned.insert(kept.members.begin(), kept.members.end());
        taken_labels.insert(norm);
        out.push_back(std::move(kept));
    }
    return out;
}

std::vector<std::string> materialize(Taxonomy& tax, const std::string& node_id,
                                     const std::vector<ClusterProposal>& proposals, int min_size,
                                     std::vector<ClusterDrop>* drops) {
    std::vector<ChildSpec> specs;
    std::vector<const ClusterProposal*> survivors;
    for (const auto& p : proposals) {
        if (static_cast<int>(p.members.size()) < min_size) {
            if (drops)
                drops->push_back({p.label, "below min cluster size (" +
                                               std::to_string(p.members.size()) + " < " +
                                               std::to_string(min_size) + ")"});
            continue;
        }
        specs.push_back({p.label, p.description});
        survivors.push_back(&p);
    }

    std::vector<std::string> skipped;
    std::vector<std::string> added = tax.add_children(node_id, specs, &skipped);
    if (drops)
        for (const auto& s : skipped) drops->push_back({s, "sibling label collision"});

    // add_children preserves spec order for non-skipped entries; pre-map each
    // new child to its cluster members.
    std::size_t added_idx = 0;
    for (const auto* p : survivors) {
        const std::string norm = Taxonomy::normalize_label(p->label);
        if (added_idx < added.size() && tax.node(added[added_idx]).label == norm) {
            for (const auto& m : p->members) tax.map_paper(added[added_idx], m);
            ++added_idx;
        }
    }

    if (added.empty()) tax.set_expansion_exhausted(node_id, true);
    return added;
}

}  // namespace taxoadapt
