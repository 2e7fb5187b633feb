#include "taxoadapt/schemas.hpp"

#include <cmath>

#include "taxoadapt/dimensions.hpp"

namespace taxoadapt {

namespace {

using nlohmann::json;

std::optional<std::string> require_string_array(const json& j, const std::string& key,
                                                bool allow_empty = true) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_array())
        return "expected object with array field '" + key + "'";
    if (!allow_empty && j[key].empty()) return "field '" + key + "' must be non-empty";
    for (const auto& e : j[key])
        if (!e.is_string()) return "field '" + key + "' must contain only strings";
    return std::nullopt;
}

std::optional<std::string> validate_dimension_labels(const json& j) {
    if (auto err = require_string_array(j, "labels")) return err;
    for (const auto& e : j["labels"])
        if (!parse_dimension(e.get<std::string>()))
            return "unknown dimension label: " + e.get<std::string>();
    return std::nullopt;
}

std::optional<std::string> validate_child_list(const json& j) {
    if (!j.is_object() || !j.contains("children") || !j["children"].is_array())
        return "expected object with array field 'children'";
    for (const auto& c : j["children"]) {
        if (!c.is_object() || !c.contains("label") || !c["label"].is_string() ||
            c["label"].get<std::string>().empty())
            return "each child needs a non-empty string 'label'";
        if (!c.contains("description") || !c["description"].is_string())
            return "each child needs a string 'description'";
    }
    return std::nullopt;
}

std::optional<std::string> validate_keywords(const json& j) {
    return require_string_array(j, "keywords");
}

std::optional<std::string> validate_child_selection(const json& j) {
    return require_string_array(j, "children");
}

std::optional<std::string> validate_subtopic_label(const json& j) {
    if (!j.is_object() || !j.contains("label") || !j["label"].is_string() ||
        j["label"].get<std::string>().empty())
        return "expected object with non-empty string field 'label'";
    return std::nullopt;
}

std::optional<std::string> validate_cluster_list(const json& j) {
    if (!j.is_object() || !j.contains("clusters") || !j["clusters"].is_array())
        return "expected object with array field 'clusters'";
    for (const auto& c : j["clusters"]) {
        if (!c.is_object() || !c.contains("label") || !c["label"].is_string() ||
            c["label"].get<std::string>().empty())
            return "each cluster needs a non-empty string 'label'";
        if (!c.contains("description") || !c["description"].is_string())
            return "each cluster needs a string 'description'";
        if (auto err = require_string_array(c, "members", /*allow_empty=*/false))
            return *err + " (cluster '" + c.value("label", "") + "')";
    }
    return std::nullopt;
}

std::optional<std::string> validate_judge_binary(const json& j) {
    if (!j.is_object() || !j.contains("verdict") || !j["verdict"].is_number_integer())
        return "expected object with integer field 'verdict'";
    const int v = j["verdict"].get<int>();
    if (v != 0 && v != 1) return "verdict must be 0 or 1";
    if (!j.contains("rationale") || !j["rationale"].is_string())
        return "expected string field 'rationale'";
    return std::nullopt;
}

std::optional<std::string> validate_judge_scale(const json& j) {
    if (!j.is_object() || !j.contains("score") || !j["score"].is_number())
        return "expected object with numeric field 'score'";
    const double s = j["score"].get<double>();
    const double allowed[] = {0.0, 0.33, 0.67, 1.0};
    bool ok = false;
    for (double a : allowed)
        if (std::abs(s - a) < 1e-9) ok = true;
    if (!ok) return "score must be one of 0, 0.33, 0.67, 1";
    if (!j.contains("rationale") || !j["rationale"].is_string())
        return "expected string field 'rationale'";
    return std::nullopt;
}

}  // namespace

const SchemaRegistry& SchemaRegistry::builtin() {
    static const SchemaRegistry reg = [] {
        SchemaRegistry r;
        r.add("dimension_labels", validate_dimension_labels);
        r.add("child_list", validate_child_list);
        r.add("keywords", validate_keywords);
        r.add("child_selection", validate_child_selection);
        r.add("subtopic_label", validate_subtopic_label);
        r.add("cluster_list", validate_cluster_list);
        r.add("judge_binary", validate_judge_binary);
        r.add("judge_scale", validate_judge_scale);
        return r;
    }();
    return reg;
}

std::optional<std::string> SchemaRegistry::validate(const std::string& id,
                                                    const nlohmann::json& value) const {
    auto it = validators_.find(id);
    if (it == validators_.end()) return "unregistered schema id: " + id;
    return it->second(value);
}

nlohmann::json parse_lenient_json(const std::string& raw) {
    // Try verbatim first.
    nlohmann::json j = nlohmann::json::parse(raw, nullptr, false);
    if (!j.is_discarded()) return j;

    // Strip code fences / surrounding prose: take the span between the first
    // '{' or '[' and the matching last '}' or ']'.
    const auto first = raw.find_first_of("{[");
    if (first == std::string::npos) return nlohmann::json::value_t::discarded;
    const char open = raw[first];
    const char close = open == '{' ? '}' : ']';
    const auto last = raw.find_last_of(close);
    if (last == std::string::npos || last <= first) return nlohmann::json::value_t::discarded;
    return nlohmann::json::parse(raw.substr(first, last - first + 1), nullptr, false);
}

}  // namespace taxoadapt
