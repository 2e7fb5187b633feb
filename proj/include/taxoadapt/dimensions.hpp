#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace taxoadapt {

// Facets of scientific contribution under which separate taxonomies are built.
enum class Dimension {
    task,
    methodology,
    datasets,
    evaluation_methods,
    real_world_domains,
};

inline constexpr std::array<Dimension, 5> kAllDimensions = {
    Dimension::task,
    Dimension::methodology,
    Dimension::datasets,
    Dimension::evaluation_methods,
    Dimension::real_world_domains,
};

std::string_view dimension_name(Dimension d);

// Suffix appended to the user topic to form a root label,
// e.g. "natural language processing" + "tasks".
std::string_view dimension_root_suffix(Dimension d);

// Contribution-type definition injected into classification prompts.
std::string_view dimension_definition(Dimension d);

std::optional<Dimension> parse_dimension(std::string_view name);

std::vector<Dimension> parse_dimension_list(std::string_view csv);

}  // namespace taxoadapt
