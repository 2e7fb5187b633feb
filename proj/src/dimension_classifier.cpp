#include "taxoadapt/dimension_classifier.hpp"

#include <algorithm>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

namespace {

CompletionRequest make_request(const Paper& p, const std::vector<Dimension>& dims,
                               const PromptLibrary& prompts) {
    std::string options;
    for (Dimension d : dims) {
        options += "- ";
        options += dimension_definition(d);
        options += "\n";
    }
    const PromptTemplate& tmpl = prompts.get("dim_classify");
    CompletionRequest req;
    req.prompt_id = tmpl.id;
    req.schema_id = tmpl.schema_id;
    req.messages = PromptLibrary::render(tmpl, {{"title", p.title},
                                                {"abstract", p.abstract_text},
                                                {"dimension_options", options}});
    req.key = {{"paper", p.id}};
    return req;
}

std::set<Dimension> parse_labels(const nlohmann::json& parsed,
                                 const std::vector<Dimension>& dims) {
    std::set<Dimension> out;
    for (const auto& l : parsed.at("labels")) {
        auto d = parse_dimension(l.get<std::string>());
        if (d && std::find(dims.begin(), dims.end(), *d) != dims.end()) out.insert(*d);
    }
    out.insert(Dimension::task);  // every paper falls under the task dimension
    return out;
}

}  // namespace

std::set<Dimension> classify_dimensions(const Paper& p, const std::vector<Dimension>& dims,
                                        Gateway& gateway, const PromptLibrary& prompts,
                                        std::vector<DegradedPaper>* degraded) {
    if (dims.empty() || std::find(dims.begin(), dims.end(), Dimension::task) == dims.end())
        throw ConfigError("dimension set must be non-empty and include task");
    try {
        CompletionResult res = gateway.complete_structured(make_request(p, dims, prompts));
        return parse_labels(res.parsed, dims);
    } catch (const StructuredOutputError& e) {
        if (degraded) degraded->push_back({p.id, e.what()});
        return {Dimension::task};
    }
}

std::map<Dimension, std::vector<const Paper*>> partition_corpus(
    Corpus& corpus, const std::vector<Dimension>& dims, Gateway& gateway,
    const PromptLibrary& prompts, int parallelism, std::vector<DegradedPaper>* degraded) {
    if (dims.empty() || std::find(dims.begin(), dims.end(), Dimension::task) == dims.end())
        throw ConfigError("dimension set must be non-empty and include task");

    std::vector<CompletionRequest> reqs;
    reqs.reserve(corpus.size());
    for (const auto& p : corpus.papers()) reqs.push_back(make_request(p, dims, prompts));

    std::vector<BatchItem> items = gateway.complete_batch(reqs, parallelism);
    for (std::size_t i = 0; i < items.size(); ++i) {
        Paper& p = corpus.papers()[i];
        if (items[i].ok()) {
            p.dimensions = parse_labels(items[i].result->parsed, dims);
        } else {
            p.dimensions = {Dimension::task};
            if (degraded) degraded->push_back({p.id, items[i].error});
        }
    }

    std::map<Dimension, std::vector<const Paper*>> views;
    for (Dimension d : dims) views[d] = corpus.dimension_view(d);
    return views;
}

}  // namespace taxoadapt
