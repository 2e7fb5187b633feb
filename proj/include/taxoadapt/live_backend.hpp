#pragma once

#include <string>

#include "taxoadapt/gateway.hpp"

namespace taxoadapt {

struct LiveBackendConfig {
    std::string host = "api.openai.com";
    int port = 443;
    bool use_tls = true;
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "TAXOADAPT_API_KEY";
    int timeout_seconds = 120;
};

// OpenAI-style chat-completion endpoint over HTTPS. API key read from the
// configured environment variable at construction.
class LiveBackend : public Backend {
public:
    explicit LiveBackend(LiveBackendConfig config);

    std::string complete(const CompletionRequest& req,
                         const std::vector<Message>& messages) override;
    std::string tag() const override { return "live"; }
    bool retryable_transport() const override { return true; }

private:
    LiveBackendConfig config_;
    std::string api_key_;
};

}  // namespace taxoadapt
