#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "taxoadapt/live_backend.hpp"

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

LiveBackend::LiveBackend(LiveBackendConfig config) : config_(std::move(config)) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key)
        throw ConfigError("live backend requires API key in $" + config_.api_key_env);
    api_key_ = key;
}

std::string LiveBackend::complete(const CompletionRequest& req,
                                  const std::vector<Message>& messages) {
    nlohmann::json body{{"model", config_.model},
                        {"temperature", req.temperature},
                        {"top_p", req.top_fraction}};
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.text}});
    body["messages"] = std::move(msgs);

    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    httplib::Result res;
    if (config_.use_tls) {
        httplib::SSLClient client(config_.host, config_.port);
        client.set_read_timeout(config_.timeout_seconds, 0);
        res = client.Post(config_.path, headers, body.dump(), "application/json");
    } else {
        httplib::Client client(config_.host, config_.port);
        client.set_read_timeout(config_.timeout_seconds, 0);
        res = client.Post(config_.path, headers, body.dump(), "application/json");
    }

    if (!res) throw TransportError("request to " + config_.host + " failed: " +
                                   httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
        throw TransportError("endpoint returned status " + std::to_string(res->status));
    if (res->status != 200)
        throw StructuredOutputError(
            "endpoint returned status " + std::to_string(res->status) + ": " + res->body,
            res->body, 1);

    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty())
        throw TransportError("malformed completion response");
    return j["choices"][0]["message"]["content"].get<std::string>();
}

}  // namespace taxoadapt
