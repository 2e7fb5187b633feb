#include "taxoadapt/prompts.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

namespace {

PromptTemplate make(std::string id, std::string schema, std::string system_text,
                    std::string user_text) {
    return PromptTemplate{std::move(id), "v1", std::move(schema), std::move(system_text),
                          std::move(user_text)};
}

std::string substitute(const std::string& text, const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find("{{", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos)
            throw ConfigError("unterminated placeholder in prompt template");
        const std::string name = text.substr(open + 2, close - open - 2);
        auto it = vars.find(name);
        if (it == vars.end())
            throw ConfigError("prompt template references unbound variable '" + name + "'");
        out += it->second;
        pos = close + 2;
    }
    return out;
}

}  // namespace

PromptLibrary PromptLibrary::builtin() {
    PromptLibrary lib;
    auto add = [&](PromptTemplate t) { lib.templates_[t.id] = std::move(t); };

    add(make("init_children", "child_list",
             "You are an expert in {{topic}}. You design concise research taxonomies.",
             "Propose the top-level children of the taxonomy rooted at \"{{root_label}}\" "
             "(dimension: {{dimension}}). {{dimension_definition}}\n"
             "Each child must be a broad, mutually distinct sub-area of {{topic}} under this "
             "dimension, all at the same level of granularity.\n"
             "Respond with JSON: {\"children\": [{\"label\": ..., \"description\": ...}]}"));

    add(make("dim_classify", "dimension_labels",
             "You classify research papers by the type of contribution they make.",
             "Classify the paper below into every contribution dimension that applies "
             "(multi-label). The options and their definitions:\n{{dimension_options}}\n\n"
             "Title: {{title}}\nAbstract: {{abstract}}\n"
             "Respond with JSON: {\"labels\": [dimension names]}"));

    add(make("enrich_node", "keywords",
             "You characterize research subtopics with indicative keywords.",
             "Node: {{node_label}} ({{description}})\nDimension: {{dimension}}\n"
             "Ancestor path: {{ancestor_path}}\n"
             "Give {{k}} distinct keywords that characterize this subtopic of {{topic}}.\n"
             "Respond with JSON: {\"keywords\": [...]}"));

    add(make("classify_children", "child_selection",
             "You perform hierarchical multi-label classification of research papers.",
             "Parent node: {{parent_label}}\nAncestor path: {{ancestor_path}}\n"
             "Candidate child nodes (label: description; keywords):\n{{children_block}}\n\n"
             "Title: {{title}}\nAbstract: {{abstract}}\n"
             "Which child nodes does this paper map to? It may map to several or none.\n"
             "Respond with JSON: {\"children\": [child labels]}"));

    add(make("pseudo_label", "subtopic_label",
             "You assign fine-grained subtopic labels to research papers.",
             "Parent node: {{node_label}} ({{node_description}})\nDimension: {{dimension}}\n"
             "Ancestor path: {{ancestor_path}}\nExisting children: {{existing_children}}\n\n"
             "Title: {{title}}\nAbstract: {{abstract}}\n"
             "Give the paper's {{dimension}} subtopic exactly one level finer than "
             "\"{{node_label}}\", at sibling granularity to the existing children.\n"
             "Respond with JSON: {\"label\": ...}"));

    add(make("cluster_subtopics", "cluster_list",
             "You cluster subtopic labels into a small set of coherent research areas.",
             "Node being expanded: {{node_label}}\nDimension: {{dimension}}\n"
             "Ancestor path: {{ancestor_path}}\nExisting children: {{existing_children}}\n\n"
             "Paper subtopic pseudo-labels (paper_id: label):\n{{pseudo_labels}}\n\n"
             "Determine the primary sub-{{dimension}} topic clusters that best encompass these "
             "labels. Maintain the taxonomy's granular relationships, maximize how many papers "
             "are covered, and minimize redundancy between clusters (and against existing "
             "children). A label may stay unassigned.\n"
             "Respond with JSON: {\"clusters\": [{\"label\": ..., \"description\": ..., "
             "\"members\": [paper ids]}]}"));

    add(make("consolidate_clusters", "cluster_list",
             "You merge overlapping cluster proposals into a deduplicated set.",
             "The following cluster proposals were produced from separate chunks of one "
             "pseudo-label list. Merge clusters describing the same area (union their members, "
             "keep one label and description) and keep distinct ones as-is.\n"
             "{{cluster_lists}}\n"
             "Respond with JSON: {\"clusters\": [{\"label\": ..., \"description\": ..., "
             "\"members\": [paper ids]}]}"));

    add(make("judge_path", "judge_binary",
             "You audit taxonomy paths for hierarchical granularity.",
             "Root-to-node path: {{path}}\n"
             "Is every step strictly more specific than its parent, preserving the hierarchical "
             "relationships between the entities? Answer 1 if yes, 0 if no.\n"
             "Respond with JSON: {\"verdict\": 0 or 1, \"rationale\": ...}"));

    add(make("judge_siblings", "judge_scale",
             "You audit taxonomy levels for sibling coherence.",
             "Parent node: {{parent_label}}\nSiblings: {{children}}\n"
             "Do the siblings form a coherent set with the same level of specificity and "
             "granularity? Score 1 (fully coherent), 0.67, 0.33, or 0 (incoherent).\n"
             "Respond with JSON: {\"score\": ..., \"rationale\": ...}"));

    add(make("judge_dimension", "judge_binary",
             "You audit taxonomy nodes for dimension alignment.",
             "Node: {{node_label}} ({{description}})\n"
             "Is this node relevant to the {{dimension}} dimension of the topic \"{{topic}}\"? "
             "Answer 1 if yes, 0 if no.\n"
             "Respond with JSON: {\"verdict\": 0 or 1, \"rationale\": ...}"));

    add(make("judge_relevance", "judge_binary",
             "You judge whether a research paper is relevant to a taxonomy node.",
             "Node: {{node_label}} ({{description}})\n"
             "Title: {{title}}\nAbstract: {{abstract}}\n"
             "Is the paper relevant to this node? Answer 1 if yes, 0 if no.\n"
             "Respond with JSON: {\"verdict\": 0 or 1, \"rationale\": ...}"));

    return lib;
}

void PromptLibrary::load_overrides(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read prompt template file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("prompts"))
        throw ConfigError("invalid prompt template file: " + path.string());
    for (const auto& p : j["prompts"]) {
        PromptTemplate t;
        t.id = p.at("id").get<std::string>();
        t.version = p.value("version", "custom");
        t.schema_id = p.at("schema").get<std::string>();
        t.system_text = p.value("system", "");
        t.user_text = p.at("user").get<std::string>();
        templates_[t.id] = std::move(t);
    }
}

const PromptTemplate& PromptLibrary::get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw ConfigError("unknown prompt id: " + id);
    return it->second;
}

std::vector<Message> PromptLibrary::render(const PromptTemplate& t,
                                           const std::map<std::string, std::string>& vars) {
    std::vector<Message> msgs;
    if (!t.system_text.empty()) msgs.push_back({"system", substitute(t.system_text, vars)});
    msgs.push_back({"user", substitute(t.user_text, vars)});
    return msgs;
}

}  // namespace taxoadapt
