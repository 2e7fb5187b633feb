#pragma once

#include <stdexcept>
#include <string>

namespace taxoadapt {

// Exit-code categories surfaced by the CLI.
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    corpus_error = 3,
    gateway_fatal = 4,
    internal_error = 5,
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Schema validation kept failing after all retries; carries the last raw text.
struct StructuredOutputError : std::runtime_error {
    StructuredOutputError(const std::string& msg, std::string last_raw, int attempts)
        : std::runtime_error(msg), last_raw_text(std::move(last_raw)), attempts(attempts) {}
    std::string last_raw_text;
    int attempts = 0;
};

// The scripted backend had no entry for a request. Always a test/fixture bug.
struct ScriptMissError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TaxonomyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace taxoadapt
