#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "taxoadapt/dimensions.hpp"
#include "taxoadapt/gateway.hpp"

namespace taxoadapt {

struct TaxoNode {
    std::string id;
    std::string label;  // normalized: lowercase, words joined by underscores
    std::string description;
    std::vector<std::string> keywords;
    Dimension dimension = Dimension::task;
    std::vector<std::string> parents;  // size 1-2; empty only for root
    std::vector<std::string> children;
    std::set<std::string> mapped_papers;
    bool expansion_exhausted = false;  // depth expansion yielded nothing

    bool is_leaf() const { return children.empty(); }
};

struct ChildSpec {
    std::string label;
    std::string description;
};

// A node's depth/width signal evaluation with the values that produced it.
struct ExpansionDecision {
    std::string node_id;
    enum class Kind { depth, width, none } kind = Kind::none;
    int rho = 0;
    int rho_unmapped = 0;
    int delta = 0;
};

std::string_view expansion_kind_name(ExpansionDecision::Kind k);

// Per-dimension rooted DAG with density accounting and depth bookkeeping.
// Level of a node is its longest root path; every level is bounded by
// max_depth. Single-writer: mutations happen on one control thread.
class Taxonomy {
public:
    Taxonomy(Dimension dim, const std::string& root_label, std::string root_description,
             int max_depth);

    Dimension dimension() const { return dimension_; }
    const std::string& root_id() const { return root_id_; }
    int max_depth() const { return max_depth_; }

    bool has_node(const std::string& id) const { return nodes_.count(id) > 0; }
    const TaxoNode& node(const std::string& id) const;
    std::size_t node_count() const { return nodes_.size(); }
    // Node ids in insertion order (stable across runs).
    const std::vector<std::string>& node_order() const { return order_; }

    // Longest root->n path length; root is level 0.
    int level(const std::string& id) const;

    int density(const std::string& id) const;

    // |P_n - union of children's P_c|; equals density for leaves.
    int unmapped_density(const std::string& id) const;

    // Attaches fresh child nodes under parent. Normalized labels colliding
    // (case-insensitively) with existing siblings are skipped and reported.
    // Returns ids of the children actually added.
    std::vector<std::string> add_children(const std::string& parent,
                                          const std::vector<ChildSpec>& specs,
                                          std::vector<std::string>* skipped_labels = nullptr);

    // Adds a second parent edge. Fails on cycle, >2 parents, or depth-bound
    // violation under longest-path recomputation.
    void attach_second_parent(const std::string& child, const std::string& parent);

    void map_paper(const std::string& id, const std::string& paper_id);
    void set_mapped_papers(const std::string& id, std::set<std::string> papers);
    void set_keywords(const std::string& id, std::vector<std::string> keywords);
    void set_expansion_exhausted(const std::string& id, bool value);

    // Labels (normalized) of a node's current children.
    std::set<std::string> child_labels(const std::string& id) const;
    // Root->n path labels along the longest path (first parent chain).
    std::vector<std::string> ancestor_path(const std::string& id) const;

    bool is_acyclic() const;

    nlohmann::json to_json() const;
    static Taxonomy from_json(const nlohmann::json& j);

    std::string to_dot() const;

    static std::string normalize_label(const std::string& raw);

private:
    TaxoNode& mut_node(const std::string& id);
    std::string allocate_id(const std::string& label);
    void check_levels_or_throw(const std::string& context) const;

    Dimension dimension_;
    std::string root_id_;
    int max_depth_;
    std::map<std::string, TaxoNode> nodes_;
    std::vector<std::string> order_;
};

// Roots one taxonomy per dimension (topic x dimension label) and asks the
// gateway for one level of children, or mirrors a user seed file instead.
std::map<Dimension, Taxonomy> init_taxonomies(
    const std::string& topic, const std::vector<Dimension>& dims, Gateway& gateway,
    const PromptLibrary& prompts, int max_depth,
    const std::optional<std::filesystem::path>& seed_file = std::nullopt,
    std::vector<std::string>* warnings = nullptr);

}  // namespace taxoadapt
