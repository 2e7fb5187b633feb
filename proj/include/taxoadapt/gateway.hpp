#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taxoadapt/prompts.hpp"
#include "taxoadapt/schemas.hpp"

namespace taxoadapt {

struct CompletionRequest {
    std::string prompt_id;
    std::vector<Message> messages;
    // Salient inputs identifying this call (scripted-backend matching key),
    // deliberately independent of template wording.
    nlohmann::json key = nlohmann::json::object();
    double temperature = 0.1;
    double top_fraction = 0.01;
    std::string schema_id;
    int max_retries = 2;
};

struct CompletionResult {
    std::string raw_text;
    nlohmann::json parsed;
    int attempts = 0;
    std::string backend_tag;
};

// One backend call: render-agnostic, returns raw model text.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const CompletionRequest& req,
                                 const std::vector<Message>& messages) = 0;
    virtual std::string tag() const = 0;
    // Transport failures are retryable; everything else is not.
    virtual bool retryable_transport() const { return false; }
};

struct BatchItem {
    std::optional<CompletionResult> result;
    std::string error;  // non-empty iff the member failed
    bool ok() const { return result.has_value(); }
};

// Provider-agnostic completion front door: schema enforcement with
// repair-retry, bounded-parallelism batching, append-only call ledger.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend,
            const SchemaRegistry* schemas = &SchemaRegistry::builtin());

    // Every call appends {prompt_id, attempts, chars in/out} to this JSONL file.
    void set_ledger(const std::filesystem::path& path);

    CompletionResult complete_structured(const CompletionRequest& req);

    // Results in request order; at most `parallelism` requests in flight.
    // Member failures are attached positionally and never abort siblings.
    std::vector<BatchItem> complete_batch(const std::vector<CompletionRequest>& reqs,
                                          int parallelism);

    const Backend& backend() const { return *backend_; }

private:
    // Ledger entries from parallel batches are flushed in request order so
    // run directories stay byte-identical across runs.
    CompletionResult complete_impl(const CompletionRequest& req, nlohmann::json* ledger_line);
    void append_ledger(const nlohmann::json& line);

    std::shared_ptr<Backend> backend_;
    const SchemaRegistry* schemas_;
    std::filesystem::path ledger_path_;
    std::mutex ledger_mutex_;
};

}  // namespace taxoadapt
