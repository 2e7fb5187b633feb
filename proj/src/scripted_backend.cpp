#include "taxoadapt/scripted_backend.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

ScriptedBackend::ScriptedBackend(const std::filesystem::path& script_file) {
    std::ifstream in(script_file);
    if (!in) throw ConfigError("cannot read script file: " + script_file.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("script file is not valid JSON");
    load(j);
}

ScriptedBackend::ScriptedBackend(const nlohmann::json& script) { load(script); }

void ScriptedBackend::load(const nlohmann::json& script) {
    if (!script.is_object() || !script.contains("entries") || !script["entries"].is_array())
        throw ConfigError("script must be an object with an 'entries' array");
    for (const auto& e : script["entries"]) {
        Entry entry;
        entry.prompt_id = e.at("prompt_id").get<std::string>();
        entry.match = e.value("match", nlohmann::json::object());
        if (e.contains("responses")) {
            for (const auto& r : e["responses"])
                entry.responses.push_back(r.is_string() ? r.get<std::string>() : r.dump());
        } else if (e.contains("response_text")) {
            entry.responses.push_back(e["response_text"].get<std::string>());
        } else if (e.contains("response")) {
            entry.responses.push_back(e["response"].dump());
        } else {
            throw ConfigError("script entry missing response for prompt_id " + entry.prompt_id);
        }
        entries_.push_back(std::move(entry));
    }
}

void ScriptedBackend::add(const std::string& prompt_id, nlohmann::json match,
                          const nlohmann::json& response) {
    add_raw(prompt_id, std::move(match), response.dump());
}

void ScriptedBackend::add_raw(const std::string& prompt_id, nlohmann::json match,
                              std::string response_text) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.push_back(Entry{prompt_id, std::move(match), {std::move(response_text)}, 0});
}

void ScriptedBackend::add_sequence(const std::string& prompt_id, nlohmann::json match,
                                   std::vector<std::string> response_texts) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.push_back(Entry{prompt_id, std::move(match), std::move(response_texts), 0});
}

nlohmann::json ScriptedBackend::script() const {
    std::lock_guard<std::mutex> lock(mutex_);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : entries_) {
        nlohmann::json je{{"prompt_id", e.prompt_id}, {"match", e.match}};
        if (e.responses.size() == 1)
            je["response_text"] = e.responses.front();
        else
            je["responses"] = e.responses;
        entries.push_back(std::move(je));
    }
    return nlohmann::json{{"entries", entries}};
}

std::string ScriptedBackend::complete(const CompletionRequest& req,
                                      const std::vector<Message>& /*messages*/) {
    const int now = in_flight_.fetch_add(1) + 1;
    int peak = peak_in_flight_.load();
    while (now > peak && !peak_in_flight_.compare_exchange_weak(peak, now)) {
    }
    // Give sibling batch workers a chance to overlap so the peak counter is
    // meaningful in tests.
    std::this_thread::sleep_for(std::chrono::microseconds(200));

    std::string response;
    bool found = false;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (auto& e : entries_) {
            if (e.prompt_id != req.prompt_id || e.match != req.key) continue;
            const std::size_t idx = std::min(e.next, e.responses.size() - 1);
            ++e.next;
            response = e.responses[idx];
            found = true;
            break;
        }
    }
    in_flight_.fetch_sub(1);
    if (!found)
        throw ScriptMissError("no script entry for prompt_id '" + req.prompt_id +
                              "' with key " + req.key.dump());
    return response;
}

}  // namespace taxoadapt
