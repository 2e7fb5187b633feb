#include "taxoadapt/gateway.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

Gateway::Gateway(std::shared_ptr<Backend> backend, const SchemaRegistry* schemas)
    : backend_(std::move(backend)), schemas_(schemas) {
    if (!backend_) throw ConfigError("gateway requires a backend");
}

void Gateway::set_ledger(const std::filesystem::path& path) { ledger_path_ = path; }

void Gateway::append_ledger(const nlohmann::json& line) {
    if (ledger_path_.empty() || line.is_null()) return;
    std::lock_guard<std::mutex> lock(ledger_mutex_);
    std::ofstream out(ledger_path_, std::ios::app);
    out << line.dump() << "\n";
}

CompletionResult Gateway::complete_impl(const CompletionRequest& req,
                                        nlohmann::json* ledger_line) {
    if (!schemas_->has(req.schema_id))
        throw ConfigError("schema id not registered: " + req.schema_id);

    std::size_t prompt_chars = 0;
    for (const auto& m : req.messages) prompt_chars += m.text.size();
    auto make_line = [&](int attempts, std::size_t response_chars, bool ok) {
        return nlohmann::json{{"prompt_id", req.prompt_id}, {"attempts", attempts},
                              {"prompt_chars", prompt_chars},
                              {"response_chars", response_chars},
                              {"ok", ok},
                              {"backend", backend_->tag()}};
    };

    std::vector<Message> messages = req.messages;
    std::string last_raw;
    std::string last_error;
    int transport_failures = 0;

    for (int attempt = 1; attempt <= req.max_retries + 1; ++attempt) {
        std::string raw;
        try {
            raw = backend_->complete(req, messages);
        } catch (const TransportError&) {
            if (!backend_->retryable_transport() || transport_failures >= req.max_retries) throw;
            ++transport_failures;
            std::this_thread::sleep_for(std::chrono::milliseconds(200 << transport_failures));
            --attempt;  // transport failures do not consume parse attempts
            continue;
        }
        last_raw = raw;

        nlohmann::json parsed = parse_lenient_json(raw);
        std::optional<std::string> err;
        if (parsed.is_discarded()) {
            err = "response was not parseable JSON";
        } else {
            err = schemas_->validate(req.schema_id, parsed);
        }
        if (!err) {
            if (ledger_line) *ledger_line = make_line(attempt, raw.size(), true);
            return CompletionResult{raw, std::move(parsed), attempt, backend_->tag()};
        }
        last_error = *err;
        messages.push_back({"user", "Your previous reply was invalid: " + *err +
                                        ". Respond again with valid JSON only, matching the "
                                        "requested format exactly."});
    }

    if (ledger_line) *ledger_line = make_line(req.max_retries + 1, last_raw.size(), false);
    throw StructuredOutputError("structured output failed for prompt '" + req.prompt_id +
                                    "' after " + std::to_string(req.max_retries + 1) +
                                    " attempts: " + last_error,
                                last_raw, req.max_retries + 1);
}

CompletionResult Gateway::complete_structured(const CompletionRequest& req) {
    nlohmann::json line;
    try {
        CompletionResult res = complete_impl(req, &line);
        append_ledger(line);
        return res;
    } catch (...) {
        append_ledger(line);
        throw;
    }
}

std::vector<BatchItem> Gateway::complete_batch(const std::vector<CompletionRequest>& reqs,
                                               int parallelism) {
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
    std::vector<BatchItem> results(reqs.size());
    if (reqs.empty()) return results;

    std::vector<nlohmann::json> lines(reqs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= reqs.size()) return;
            try {
                results[i].result = complete_impl(reqs[i], &lines[i]);
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    };

    const std::size_t n_threads = std::min<std::size_t>(parallelism, reqs.size());
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    for (const auto& line : lines) append_ledger(line);
    return results;
}

}  // namespace taxoadapt
