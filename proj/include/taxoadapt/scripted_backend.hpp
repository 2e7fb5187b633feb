#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taxoadapt/gateway.hpp"

namespace taxoadapt {

// Deterministic stand-in for the LLM, keyed on (prompt_id, salient-input key).
// A missing entry is a script-miss error, never a silent fallback.
//
// Script file format: {"entries": [{"prompt_id": ..., "match": {...},
//   "response": <json>} ]}. "response_text" (raw string) may replace
// "response"; "responses" (array, consumed in order) may replace either.
class ScriptedBackend : public Backend {
public:
    ScriptedBackend() = default;
    explicit ScriptedBackend(const std::filesystem::path& script_file);
    explicit ScriptedBackend(const nlohmann::json& script);

    // Test-fixture construction.
    void add(const std::string& prompt_id, nlohmann::json match, const nlohmann::json& response);
    void add_raw(const std::string& prompt_id, nlohmann::json match, std::string response_text);
    void add_sequence(const std::string& prompt_id, nlohmann::json match,
                      std::vector<std::string> response_texts);

    nlohmann::json script() const;

    std::string complete(const CompletionRequest& req,
                         const std::vector<Message>& messages) override;
    std::string tag() const override { return "scripted"; }

    // Concurrency instrumentation for batch tests.
    int peak_in_flight() const { return peak_in_flight_.load(); }

private:
    struct Entry {
        std::string prompt_id;
        nlohmann::json match;
        std::vector<std::string> responses;
        std::size_t next = 0;
    };

    void load(const nlohmann::json& script);

    std::vector<Entry> entries_;
    mutable std::mutex mutex_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_in_flight_{0};
};

}  // namespace taxoadapt
