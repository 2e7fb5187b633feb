#include "taxoadapt/dimensions.hpp"

#include <sstream>

namespace taxoadapt {

std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::task: return "task";
        case Dimension::methodology: return "methodology";
        case Dimension::datasets: return "datasets";
        case Dimension::evaluation_methods: return "evaluation_methods";
        case Dimension::real_world_domains: return "real_world_domains";
    }
    return "unknown";
}

std::string_view dimension_root_suffix(Dimension d) {
    switch (d) {
        case Dimension::task: return "tasks";
        case Dimension::methodology: return "methodologies";
        case Dimension::datasets: return "datasets";
        case Dimension::evaluation_methods: return "evaluation methods";
        case Dimension::real_world_domains: return "real-world domains";
    }
    return "topics";
}

std::string_view dimension_definition(Dimension d) {
    switch (d) {
        case Dimension::task:
            return "Task: We assume all papers are associated with a task.";
        case Dimension::methodology:
            return "Methodology: A paper that introduces, explains, or refines a method or "
                   "approach, providing theoretical foundations, implementation details, and "
                   "empirical evaluations to advance the state-of-the-art or solve specific "
                   "problems.";
        case Dimension::datasets:
            return "Datasets: Introduces a new dataset, detailing its creation, structure, and "
                   "intended use, while providing analysis or benchmarks to demonstrate its "
                   "relevance and utility. It focuses on advancing research by addressing gaps in "
                   "existing datasets/performance of SOTA models or enabling new applications in "
                   "the field.";
        case Dimension::evaluation_methods:
            return "Evaluation Methods: A paper that assesses the performance, limitations, or "
                   "biases of models, methods, or datasets using systematic experiments or "
                   "analyses. It focuses on benchmarking, comparative studies, or proposing new "
                   "evaluation metrics or frameworks to provide insights and improve understanding "
                   "in the field.";
        case Dimension::real_world_domains:
            return "Real-World Domains: A paper which demonstrates the use of techniques to solve "
                   "specific, real-world problems or address specific domain challenges. It "
                   "focuses on practical implementation, impact, and insights gained from applying "
                   "methods in various contexts. Examples include: product recommendation systems, "
                   "medical record summarization, etc.";
    }
    return "";
}

std::optional<Dimension> parse_dimension(std::string_view name) {
    for (Dimension d : kAllDimensions) {
        if (dimension_name(d) == name) return d;
    }
    // Accept a couple of common short forms seen in configs.
    if (name == "evaluation") return Dimension::evaluation_methods;
    if (name == "domains") return Dimension::real_world_domains;
    return std::nullopt;
}

std::vector<Dimension> parse_dimension_list(std::string_view csv) {
    std::vector<Dimension> out;
    std::string token;
    std::istringstream ss{std::string(csv)};
    while (std::getline(ss, token, ',')) {
        // trim
        const auto b = token.find_first_not_of(" \t");
        const auto e = token.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        token = token.substr(b, e - b + 1);
        auto d = parse_dimension(token);
        if (!d) throw std::invalid_argument("unknown dimension: " + token);
        out.push_back(*d);
    }
    return out;
}

}  // namespace taxoadapt
