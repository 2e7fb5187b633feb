#include "taxoadapt/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

std::string_view expansion_kind_name(ExpansionDecision::Kind k) {
    switch (k) {
        case ExpansionDecision::Kind::depth: return "depth";
        case ExpansionDecision::Kind::width: return "width";
        case ExpansionDecision::Kind::none: return "none";
    }
    return "none";
}

std::string Taxonomy::normalize_label(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    bool last_underscore = true;  // suppress leading underscores
    for (char c : raw) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            last_underscore = false;
        } else if (!last_underscore) {
            out += '_';
            last_underscore = true;
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

Taxonomy::Taxonomy(Dimension dim, const std::string& root_label, std::string root_description,
                   int max_depth)
    : dimension_(dim), max_depth_(max_depth) {
    if (max_depth_ < 1) throw TaxonomyError("max_depth must be >= 1");
    TaxoNode root;
    root.label = normalize_label(root_label);
    if (root.label.empty()) throw TaxonomyError("root label must be non-empty");
    root.id = root.label;
    root.description = std::move(root_description);
    root.dimension = dim;
    root_id_ = root.id;
    nodes_[root.id] = std::move(root);
    order_.push_back(root_id_);
}

const TaxoNode& Taxonomy::node(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw TaxonomyError("unknown node id: " + id);
    return it->second;
}

TaxoNode& Taxonomy::mut_node(const std::string& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw TaxonomyError("unknown node id: " + id);
    return it->second;
}

int Taxonomy::level(const std::string& id) const {
    node(id);  // existence check
    // Longest path from root; DAGs here are small, so plain memoized DFS.
    std::map<std::string, int> memo;
    std::function<int(const std::string&)> depth_of = [&](const std::string& nid) -> int {
        auto it = memo.find(nid);
        if (it != memo.end()) return it->second;
        const TaxoNode& n = node(nid);
        int best = 0;
        for (const auto& p : n.parents) best = std::max(best, depth_of(p) + 1);
        memo[nid] = best;
        return best;
    };
    return depth_of(id);
}

int Taxonomy::density(const std::string& id) const {
    return static_cast<int>(node(id).mapped_papers.size());
}

int Taxonomy::unmapped_density(const std::string& id) const {
    const TaxoNode& n = node(id);
    if (n.children.empty()) return static_cast<int>(n.mapped_papers.size());
    std::set<std::string> covered;
    for (const auto& c : n.children) {
        const auto& cp = node(c).mapped_papers;
        covered.insert(cp.begin(), cp.end());
    }
    int count = 0;
    for (const auto& p : n.mapped_papers)
        if (!covered.count(p)) ++count;
    return count;
}

std::string Taxonomy::allocate_id(const std::string& label) {
    if (!nodes_.count(label)) return label;
    for (int i = 2;; ++i) {
        std::string candidate = label + "_" + std::to_string(i);
        if (!nodes_.count(candidate)) return candidate;
    }
}

std::vector<std::string> Taxonomy::add_children(const std::string& parent,
                                                const std::vector<ChildSpec>& specs,
                                                std::vector<std::string>* skipped_labels) {
    TaxoNode& p = mut_node(parent);
    if (level(parent) + 1 > max_depth_)
        throw TaxonomyError("adding children to '" + parent + "' would exceed max depth " +
                            std::to_string(max_depth_));

    std::set<std::string> sibling_labels = child_labels(parent);
    std::vector<std::string> added;
    for (const auto& spec : specs) {
        const std::string label = normalize_label(spec.label);
        if (label.empty()) throw TaxonomyError("empty child label under '" + parent + "'");
        if (sibling_labels.count(label)) {
            if (skipped_labels) skipped_labels->push_back(label);
            continue;
        }
        sibling_labels.insert(label);

        TaxoNode child;
        child.id = allocate_id(label);
        child.label = label;
        child.description = spec.description;
        child.dimension = dimension_;
        child.parents.push_back(parent);
        nodes_[child.id] = child;
        order_.push_back(child.id);
        p.children.push_back(child.id);
        added.push_back(child.id);
    }
    return added;
}

void Taxonomy::attach_second_parent(const std::string& child, const std::string& parent) {
    TaxoNode& c = mut_node(child);
    TaxoNode& p = mut_node(parent);
    if (c.parents.size() != 1)
        throw TaxonomyError("attach_second_parent requires exactly one existing parent");
    if (c.parents.front() == parent)
        throw TaxonomyError("'" + parent + "' is already a parent of '" + child + "'");

    // Cycle check: the new edge parent->child closes a cycle iff parent is
    // reachable from child.
    std::vector<std::string> stack{child};
    std::set<std::string> seen;
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (cur == parent)
            throw TaxonomyError("attaching '" + child + "' under '" + parent +
                                "' would form a cycle");
        if (!seen.insert(cur).second) continue;
        for (const auto& ch : node(cur).children) stack.push_back(ch);
    }

    // Sibling label collision under the new parent.
    if (child_labels(parent).count(c.label))
        throw TaxonomyError("parent '" + parent + "' already has a child labeled '" + c.label +
                            "'");

    c.parents.push_back(parent);
    p.children.push_back(child);
    try {
        check_levels_or_throw("attach_second_parent");
    } catch (...) {
        c.parents.pop_back();
        p.children.pop_back();
        throw;
    }
}

void Taxonomy::check_levels_or_throw(const std::string& context) const {
    for (const auto& id : order_) {
        if (level(id) > max_depth_)
            throw TaxonomyError(context + ": node '" + id + "' would exceed max depth " +
                                std::to_string(max_depth_));
    }
}

void Taxonomy::map_paper(const std::string& id, const std::string& paper_id) {
    mut_node(id).mapped_papers.insert(paper_id);
}

void Taxonomy::set_mapped_papers(const std::string& id, std::set<std::string> papers) {
    mut_node(id).mapped_papers = std::move(papers);
}

void Taxonomy::set_keywords(const std::string& id, std::vector<std::string> keywords) {
    mut_node(id).keywords = std::move(keywords);
}

void Taxonomy::set_expansion_exhausted(const std::string& id, bool value) {
    mut_node(id).expansion_exhausted = value;
}

std::set<std::string> Taxonomy::child_labels(const std::string& id) const {
    std::set<std::string> labels;
    for (const auto& c : node(id).children) labels.insert(node(c).label);
    return labels;
}

std::vector<std::string> Taxonomy::ancestor_path(const std::string& id) const {
    std::vector<std::string> path;
    std::string cur = id;
    while (true) {
        const TaxoNode& n = node(cur);
        path.push_back(n.label);
        if (n.parents.empty()) break;
        // Follow the parent on the longest path for a depth-faithful context.
        std::string best = n.parents.front();
        for (const auto& p : n.parents)
            if (level(p) > level(best)) best = p;
        cur = best;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

bool Taxonomy::is_acyclic() const {
    // Kahn over child edges.
    std::map<std::string, int> indegree;
    for (const auto& id : order_) indegree[id] = static_cast<int>(node(id).parents.size());
    std::vector<std::string> queue;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) queue.push_back(id);
    std::size_t visited = 0;
    while (!queue.empty()) {
        std::string cur = queue.back();
        queue.pop_back();
        ++visited;
        for (const auto& c : node(cur).children)
            if (--indegree[c] == 0) queue.push_back(c);
    }
    return visited == nodes_.size();
}

nlohmann::json Taxonomy::to_json() const {
    nlohmann::json jnodes = nlohmann::json::array();
    for (const auto& id : order_) {
        const TaxoNode& n = node(id);
        jnodes.push_back({{"id", n.id},
                          {"label", n.label},
                          {"description", n.description},
                          {"keywords", n.keywords},
                          {"parents", n.parents},
                          {"children", n.children},
                          {"mapped_papers", std::vector<std::string>(n.mapped_papers.begin(),
                                                                     n.mapped_papers.end())},
                          {"expansion_exhausted", n.expansion_exhausted}});
    }
    return nlohmann::json{{"schema_version", 1},
                          {"dimension", std::string(dimension_name(dimension_))},
                          {"root", root_id_},
                          {"max_depth", max_depth_},
                          {"nodes", jnodes}};
}

Taxonomy Taxonomy::from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema_version", 0) != 1)
        throw TaxonomyError("unsupported taxonomy schema version");
    auto dim = parse_dimension(j.at("dimension").get<std::string>());
    if (!dim) throw TaxonomyError("unknown dimension in taxonomy document");

    const std::string root_id = j.at("root").get<std::string>();
    const int max_depth = j.at("max_depth").get<int>();

    // Rebuild through a blank taxonomy, then restore node table verbatim.
    Taxonomy tax(*dim, root_id, "", max_depth);
    tax.nodes_.clear();
    tax.order_.clear();
    tax.root_id_ = root_id;

    for (const auto& jn : j.at("nodes")) {
        TaxoNode n;
        n.id = jn.at("id").get<std::string>();
        n.label = jn.at("label").get<std::string>();
        n.description = jn.value("description", "");
        n.keywords = jn.value("keywords", std::vector<std::string>{});
        n.dimension = *dim;
        n.parents = jn.value("parents", std::vector<std::string>{});
        n.children = jn.value("children", std::vector<std::string>{});
        for (const auto& p : jn.value("mapped_papers", std::vector<std::string>{}))
            n.mapped_papers.insert(p);
        n.expansion_exhausted = jn.value("expansion_exhausted", false);
        if (tax.nodes_.count(n.id)) throw TaxonomyError("duplicate node id: " + n.id);
        tax.order_.push_back(n.id);
        tax.nodes_[n.id] = std::move(n);
    }

    if (!tax.nodes_.count(root_id)) throw TaxonomyError("root node missing: " + root_id);
    for (const auto& id : tax.order_) {
        const TaxoNode& n = tax.nodes_.at(id);
        for (const auto& p : n.parents)
            if (!tax.nodes_.count(p)) throw TaxonomyError("dangling parent id: " + p);
        for (const auto& c : n.children)
            if (!tax.nodes_.count(c)) throw TaxonomyError("dangling child id: " + c);
        if (n.parents.size() > 2) throw TaxonomyError("node '" + id + "' has >2 parents");
    }
    if (!tax.is_acyclic()) throw TaxonomyError("taxonomy document contains a cycle");
    tax.check_levels_or_throw("deserialize");
    return tax;
}

std::string Taxonomy::to_dot() const {
    std::ostringstream out;
    out << "digraph taxonomy {\n  rankdir=TB;\n  node [shape=box];\n";
    for (const auto& id : order_) {
        const TaxoNode& n = node(id);
        out << "  \"" << id << "\" [label=\"" << n.label << " (" << n.mapped_papers.size()
            << ")\"];\n";
    }
    for (const auto& id : order_) {
        for (const auto& c : node(id).children) out << "  \"" << id << "\" -> \"" << c << "\";\n";
    }
    out << "}\n";
    return out.str();
}

std::map<Dimension, Taxonomy> init_taxonomies(
    const std::string& topic, const std::vector<Dimension>& dims, Gateway& gateway,
    const PromptLibrary& prompts, int max_depth,
    const std::optional<std::filesystem::path>& seed_file, std::vector<std::string>* warnings) {
    if (topic.empty()) throw ConfigError("topic must be non-empty");

    std::map<Dimension, Taxonomy> out;

    if (seed_file) {
        std::ifstream in(*seed_file);
        if (!in) throw ConfigError("cannot read seed taxonomy file: " + seed_file->string());
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("taxonomies"))
            throw ConfigError("seed file must be {\"taxonomies\": [...]}");
        for (const auto& jt : j["taxonomies"]) {
            Taxonomy tax = Taxonomy::from_json(jt);
            out.emplace(tax.dimension(), std::move(tax));
        }
        for (Dimension d : dims)
            if (!out.count(d))
                throw ConfigError("seed file missing dimension: " +
                                  std::string(dimension_name(d)));
        return out;
    }

    for (Dimension d : dims) {
        const std::string root_label = topic + " " + std::string(dimension_root_suffix(d));
        Taxonomy tax(d, root_label,
                     "Root of the " + std::string(dimension_name(d)) + " taxonomy for " + topic,
                     max_depth);

        const PromptTemplate& tmpl = prompts.get("init_children");
        CompletionRequest req;
        req.prompt_id = tmpl.id;
        req.schema_id = tmpl.schema_id;
        req.messages = PromptLibrary::render(
            tmpl, {{"topic", topic},
                   {"root_label", root_label},
                   {"dimension", std::string(dimension_name(d))},
                   {"dimension_definition", std::string(dimension_definition(d))}});
        req.key = {{"topic", topic}, {"dimension", std::string(dimension_name(d))}};

        CompletionResult res = gateway.complete_structured(req);
        std::vector<ChildSpec> specs;
        for (const auto& c : res.parsed["children"])
            specs.push_back({c["label"].get<std::string>(), c["description"].get<std::string>()});

        std::vector<std::string> skipped;
        tax.add_children(tax.root_id(), specs, &skipped);
        if (warnings)
            for (const auto& s : skipped)
                warnings->push_back("duplicate proposed child label merged: " + s + " (" +
                                    std::string(dimension_name(d)) + ")");
        out.emplace(d, std::move(tax));
    }
    return out;
}

}  // namespace taxoadapt
