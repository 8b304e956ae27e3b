#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsreason/json.hpp"

namespace tsr {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

/// Backend hard failures. These abort an agent run as transport errors,
/// distinct from AGENT_FAILURE.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AuthError : TransportError {
    using TransportError::TransportError;
};
struct FixtureError : TransportError {
    using TransportError::TransportError;
};

enum class BackendKind { None, Http, Scripted };

struct BackendConfig {
    BackendKind kind = BackendKind::None;
    // http
    std::string endpoint;  // base URL, e.g. http://127.0.0.1:8080/v1
    std::string model = "gpt-4o-mini";
    std::string auth_env = "OPENAI_API_KEY";
    double temperature = 0.0;
    int max_retries = 3;
    int retry_backoff_ms = 250;
    // scripted
    std::string script_path;  // fixture file
    Json fixture;             // inline fixture (takes precedence when non-null)

    static BackendConfig http(std::string endpoint, std::string model = "gpt-4o-mini");
    static BackendConfig scripted_file(std::string path);
    static BackendConfig scripted(Json fixture);
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

/// Replays canned responses. Each fixture entry is
///   { "match": {"ordinal": k} | {"contains": text}, "response": text }
/// and fires at most once: an omitted match fires unconditionally (plain
/// ordinal replay), "ordinal" fires on the k-th call (1-based), "contains"
/// fires when the last user message contains the text.
class ScriptedBackend : public LlmBackend {
public:
    explicit ScriptedBackend(Json fixture);
    static ScriptedBackend from_file(const std::string& path);

    std::string complete(const std::vector<ChatMessage>& messages) override;

    std::size_t calls_made() const { return calls_; }
    std::size_t entries_left() const;

private:
    struct Entry {
        std::optional<std::size_t> ordinal;
        std::optional<std::string> contains;
        std::string response;
        bool consumed = false;
    };
    std::vector<Entry> entries_;
    std::size_t calls_ = 0;
};

/// OpenAI-compatible chat-completions client. Retries transient failures
/// (connect errors, 429, 5xx) with exponential backoff, then surfaces a
/// TransportError; 401/403 raise AuthError naming the auth env var.
class HttpBackend : public LlmBackend {
public:
    explicit HttpBackend(BackendConfig config);
    std::string complete(const std::vector<ChatMessage>& messages) override;

private:
    BackendConfig config_;
};

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& config);

/// Spec-shaped convenience wrapper: one completion against a fresh backend.
std::string complete(const BackendConfig& config, const std::vector<ChatMessage>& messages);

}  // namespace tsr
