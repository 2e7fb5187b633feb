#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace taxoadapt {

// Returns an error description, or nullopt when the value conforms.
using SchemaValidator = std::function<std::optional<std::string>(const nlohmann::json&)>;

// Registry of structured-output schemas the gateway enforces.
class SchemaRegistry {
public:
    // Registry pre-populated with every schema the pipeline uses:
    //   dimension_labels, child_list, keywords, child_selection,
    //   subtopic_label, cluster_list, judge_binary, judge_scale.
    static const SchemaRegistry& builtin();

    void add(std::string id, SchemaValidator v) { validators_[std::move(id)] = std::move(v); }
    bool has(const std::string& id) const { return validators_.count(id) > 0; }

    std::optional<std::string> validate(const std::string& id, const nlohmann::json& value) const;

private:
    std::map<std::string, SchemaValidator> validators_;
};

// Strips markdown code fences and leading chatter around a JSON payload,
// then parses it. Returns discarded json on failure.
nlohmann::json parse_lenient_json(const std::string& raw);

}  // namespace taxoadapt
