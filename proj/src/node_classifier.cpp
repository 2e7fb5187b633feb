#include "taxoadapt/node_classifier.hpp"

#include <algorithm>
#include <map>
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

std::string children_block(const Taxonomy& tax, const TaxoNode& n) {
    std::ostringstream out;
    for (const auto& cid : n.children) {
        const TaxoNode& c = tax.node(cid);
        out << "- " << c.label << ": " << c.description;
        if (!c.keywords.empty()) out << " (keywords: " << join(c.keywords, ", ") << ")";
        out << "\n";
    }
    return out.str();
}

CompletionRequest make_classify_request(const Paper& p, const Taxonomy& tax, const TaxoNode& n,
                                        const PromptLibrary& prompts) {
    const PromptTemplate& tmpl = prompts.get("classify_children");
    CompletionRequest req;
    req.prompt_id = tmpl.id;
    req.schema_id = tmpl.schema_id;
    req.messages = PromptLibrary::render(
        tmpl, {{"parent_label", n.label},
               {"ancestor_path", join(tax.ancestor_path(n.id), " -> ")},
               {"children_block", children_block(tax, n)},
               {"title", p.title},
               {"abstract", p.abstract_text}});
    // Keyed on (paper, parent) only: the resolver drops labels outside the
    // current child set, so one oracle entry covers pre- and post-width calls.
    req.key = {{"paper", p.id}, {"node", n.label}};
    return req;
}

std::set<std::string> resolve_child_ids(const nlohmann::json& parsed, const Taxonomy& tax,
                                        const TaxoNode& n) {
    std::map<std::string, std::string> by_label;
    for (const auto& cid : n.children) by_label[tax.node(cid).label] = cid;
    std::set<std::string> ids;
    for (const auto& l : parsed.at("children")) {
        auto it = by_label.find(Taxonomy::normalize_label(l.get<std::string>()));
        if (it != by_label.end()) ids.insert(it->second);  // labels outside the child set dropped
    }
    return ids;
}

}  // namespace

void enrich_node(Taxonomy& tax, const std::string& node_id, const std::string& topic,
                 Gateway& gateway, const PromptLibrary& prompts, int k,
                 std::vector<DegradedClassification>* degraded) {
    const TaxoNode& n = tax.node(node_id);
    if (!n.keywords.empty()) return;

    const PromptTemplate& tmpl = prompts.get("enrich_node");
    CompletionRequest req;
    req.prompt_id = tmpl.id;
    req.schema_id = tmpl.schema_id;
    req.messages = PromptLibrary::render(
        tmpl, {{"node_label", n.label},
               {"description", n.description},
               {"dimension", std::string(dimension_name(n.dimension))},
               {"ancestor_path", join(tax.ancestor_path(node_id), " -> ")},
               {"topic", topic},
               {"k", std::to_string(k)}});
    req.key = {{"node", n.label}, {"dimension", std::string(dimension_name(n.dimension))}};

    try {
        CompletionResult res = gateway.complete_structured(req);
        std::vector<std::string> keywords;
        std::set<std::string> seen;
        for (const auto& kw : res.parsed["keywords"]) {
            std::string norm = Taxonomy::normalize_label(kw.get<std::string>());
            if (!norm.empty() && seen.insert(norm).second) keywords.push_back(norm);
        }
        tax.set_keywords(node_id, std::move(keywords));
    } catch (const StructuredOutputError& e) {
        if (degraded) degraded->push_back({node_id, "", e.what()});
    }
}

std::set<std::string> classify_to_children(const Paper& p, const Taxonomy& tax,
                                           const std::string& node_id, Gateway& gateway,
                                           const PromptLibrary& prompts,
                                           std::vector<DegradedClassification>* degraded) {
    const TaxoNode& n = tax.node(node_id);
    if (n.children.empty()) throw TaxonomyError("classify_to_children requires children");
    if (!n.mapped_papers.count(p.id))
        throw TaxonomyError("paper " + p.id + " is not mapped to node " + node_id);
    try {
        CompletionResult res =
            gateway.complete_structured(make_classify_request(p, tax, n, prompts));
        return resolve_child_ids(res.parsed, tax, n);
    } catch (const StructuredOutputError& e) {
        // Conservative: unmapped at this level.
        if (degraded) degraded->push_back({node_id, p.id, e.what()});
        return {};
    }
}

void map_level(Taxonomy& tax, Corpus& corpus, const std::string& node_id, Gateway& gateway,
               const PromptLibrary& prompts, int parallelism,
               std::vector<DegradedClassification>* degraded) {
    const TaxoNode& n = tax.node(node_id);
    if (n.children.empty()) throw TaxonomyError("map_level requires children");
    if (n.mapped_papers.empty()) return;

    std::vector<std::string> paper_ids(n.mapped_papers.begin(), n.mapped_papers.end());
    std::vector<CompletionRequest> reqs;
    reqs.reserve(paper_ids.size());
    for (const auto& pid : paper_ids)
        reqs.push_back(make_classify_request(corpus.by_id(pid), tax, n, prompts));

    std::vector<BatchItem> items = gateway.complete_batch(reqs, parallelism);

    // Mutations applied serially after the batch completes.
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!items[i].ok()) {
            if (degraded) degraded->push_back({node_id, paper_ids[i], items[i].error});
            continue;
        }
        for (const auto& cid : resolve_child_ids(items[i].result->parsed, tax, n))
            tax.map_paper(cid, paper_ids[i]);
    }
}

}  // namespace taxoadapt
