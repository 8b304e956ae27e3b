#include "tsreason/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace tsr {

BackendConfig BackendConfig::http(std::string endpoint, std::string model) {
    BackendConfig cfg;
    cfg.kind = BackendKind::Http;
    cfg.endpoint = std::move(endpoint);
    cfg.model = std::move(model);
    return cfg;
}

BackendConfig BackendConfig::scripted_file(std::string path) {
    BackendConfig cfg;
    cfg.kind = BackendKind::Scripted;
    cfg.script_path = std::move(path);
    return cfg;
}

BackendConfig BackendConfig::scripted(Json fixture) {
    BackendConfig cfg;
    cfg.kind = BackendKind::Scripted;
    cfg.fixture = std::move(fixture);
    return cfg;
}

ScriptedBackend::ScriptedBackend(Json fixture) {
    if (!fixture.is_array()) throw FixtureError("fixture must be a JSON list of entries");
    for (const auto& item : fixture) {
        Entry entry;
        if (item.is_string()) {
            entry.response = item.get<std::string>();
        } else {
            entry.response = item.at("response").get<std::string>();
            if (item.contains("match")) {
                const auto& match = item.at("match");
                if (match.contains("ordinal"))
                    entry.ordinal = match.at("ordinal").get<std::size_t>();
                if (match.contains("contains"))
                    entry.contains = match.at("contains").get<std::string>();
            }
        }
        entries_.push_back(std::move(entry));
    }
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FixtureError("cannot open fixture file: " + path);
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw FixtureError("cannot parse fixture file " + path + ": " + e.what());
    }
    return ScriptedBackend(std::move(doc));
}

std::size_t ScriptedBackend::entries_left() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.consumed ? 0 : 1;
    return n;
}

std::string ScriptedBackend::complete(const std::vector<ChatMessage>& messages) {
    ++calls_;
    std::string last_user;
    for (const auto& m : messages) {
        if (m.role == "user") last_user = m.content;
    }
    bool any_left = false;
    for (auto& entry : entries_) {
        if (entry.consumed) continue;
        any_left = true;
        bool fires = true;
        if (entry.ordinal && *entry.ordinal != calls_) fires = false;
        if (entry.contains && last_user.find(*entry.contains) == std::string::npos) fires = false;
        if (fires) {
            entry.consumed = true;
            return entry.response;
        }
    }
    if (!any_left)
        throw FixtureError("scripted fixture exhausted after " + std::to_string(calls_ - 1) +
                           " responses");
    throw FixtureError("no fixture matcher fires for call " + std::to_string(calls_));
}

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw TransportError("http backend needs an endpoint");
}

namespace {

// split "http://host:port/base" into client root and path prefix
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    const auto path_start =
        endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string base = endpoint.substr(path_start);
    while (!base.empty() && base.back() == '/') base.pop_back();
    return {endpoint.substr(0, path_start), base};
}

}  // namespace

std::string HttpBackend::complete(const std::vector<ChatMessage>& messages) {
    const auto [root, base] = split_endpoint(config_.endpoint);
    httplib::Client client(root);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);

    httplib::Headers headers;
    const char* key = config_.auth_env.empty() ? nullptr : std::getenv(config_.auth_env.c_str());
    if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);

    Json body;
    body["model"] = config_.model;
    body["messages"] = Json::array();
    for (const auto& m : messages)
        body["messages"].push_back(Json{{"role", m.role}, {"content", m.content}});
    body["temperature"] = config_.temperature;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config_.retry_backoff_ms << (attempt - 1)));
        }
        auto res = client.Post(base + "/chat/completions", headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError("authentication rejected (HTTP " + std::to_string(res->status) +
                            "); set the " + config_.auth_env + " environment variable");
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("chat completion failed with HTTP " +
                                 std::to_string(res->status) + ": " + res->body);
        }
        try {
            Json doc = Json::parse(res->body);
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            throw TransportError(std::string("malformed chat completion response: ") + e.what());
        }
    }
    throw TransportError("chat completion failed after " + std::to_string(config_.max_retries + 1) +
                         " attempts (" + last_error + ")");
}

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& config) {
    switch (config.kind) {
        case BackendKind::Http:
            return std::make_unique<HttpBackend>(config);
        case BackendKind::Scripted:
            if (!config.fixture.is_null())
                return std::make_unique<ScriptedBackend>(config.fixture);
            return std::make_unique<ScriptedBackend>(
                ScriptedBackend::from_file(config.script_path));
        case BackendKind::None:
            break;
    }
    throw TransportError("no backend configured");
}

std::string complete(const BackendConfig& config, const std::vector<ChatMessage>& messages) {
    return make_backend(config)->complete(messages);
}

}  // namespace tsr
