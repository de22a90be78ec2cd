#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "questforge/remote_backend.hpp"

#include <cstdlib>
#include <thread>

namespace questforge {

using nlohmann::json;

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // prefix, no trailing slash
};

Endpoint split_base(const std::string& base) {
    const auto scheme_end = base.find("://");
    if (scheme_end == std::string::npos)
        throw LlmError(LlmErrorKind::protocol, "API base must include a scheme: " + base);
    const auto path_start = base.find('/', scheme_end + 3);
    Endpoint ep;
    ep.origin = base.substr(0, path_start);
    if (path_start != std::string::npos) ep.path = base.substr(path_start);
    while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
    return ep;
}

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return (v != nullptr && *v != '\0') ? std::string(v) : std::move(fallback);
}

}  // namespace

RemoteConfig remote_config_from_env() {
    RemoteConfig cfg;
    cfg.api_key = env_or("QUESTFORGE_API_KEY", "");
    if (cfg.api_key.empty()) throw LlmError(LlmErrorKind::auth, "QUESTFORGE_API_KEY is not set");
    cfg.api_base = env_or("QUESTFORGE_API_BASE", cfg.api_base);
    cfg.model = env_or("QUESTFORGE_MODEL", cfg.model);
    return cfg;
}

json chat_request_body(const PromptDocument& doc, const CompletionParams& params,
                       const std::string& model) {
    json messages = json::array();
    for (const PromptMessage& m : doc.messages) {
        switch (m.role) {
            case Role::system:
                messages.push_back({{"role", "system"}, {"content", m.text}});
                break;
            case Role::npc:
                messages.push_back({{"role", "assistant"}, {"content", m.text}});
                break;
            case Role::player:
                messages.push_back({{"role", "user"}, {"content", m.text}});
                break;
            case Role::function_return:
                messages.push_back({{"role", "user"}, {"content", "Function_Returns: " + m.text}});
                break;
        }
    }
    return {{"model", model},
            {"messages", std::move(messages)},
            {"temperature", params.temperature},
            {"max_tokens", params.max_tokens}};
}

std::string RemoteBackend::complete(const PromptDocument& doc, const CompletionParams& params) {
    const Endpoint ep = split_base(config_.api_base);
    const std::string body = chat_request_body(doc, params, config_.model).dump();
    const httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};
    const auto timeout = params.timeout;
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);

    last_attempts_ = 0;
    for (std::size_t attempt = 0;; ++attempt) {
        ++last_attempts_;
        httplib::Client client(ep.origin);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        const auto started = std::chrono::steady_clock::now();
        auto res = client.Post(ep.path + "/chat/completions", headers, body, "application/json");

        std::optional<LlmError> retryable;
        if (!res) {
            const auto err = res.error();
            const bool timed_out =
                err == httplib::Error::ConnectionTimeout ||
                (err == httplib::Error::Read &&
                 std::chrono::steady_clock::now() - started >= timeout);
            if (timed_out) throw LlmError(LlmErrorKind::timeout, "completion timed out");
            retryable.emplace(LlmErrorKind::transport, "transport failure: " + httplib::to_string(err));
        } else if (res->status == 401 || res->status == 403) {
            throw LlmError(LlmErrorKind::auth, "authentication rejected (HTTP " +
                                                   std::to_string(res->status) + ")");
        } else if (res->status == 429 || res->status >= 500) {
            retryable.emplace(LlmErrorKind::transport, "HTTP " + std::to_string(res->status));
        } else if (res->status != 200) {
            throw LlmError(LlmErrorKind::protocol, "HTTP " + std::to_string(res->status));
        } else {
            try {
                const json reply = json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const json::exception& e) {
                throw LlmError(LlmErrorKind::protocol, std::string("unexpected reply: ") + e.what());
            }
        }

        if (attempt >= config_.backoff.size()) throw *retryable;
        std::this_thread::sleep_for(config_.backoff[attempt]);
    }
}

std::shared_ptr<LlmBackend> make_backend(const std::string& spec) {
    if (spec == "remote") return std::make_shared<RemoteBackend>(remote_config_from_env());
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("unknown backend " + spec);
    const std::string kind = spec.substr(0, colon);
    const std::filesystem::path file = spec.substr(colon + 1);
    if (kind == "replay") return std::make_shared<ReplayBackend>(read_tape(file));
    if (kind != "scripted") throw std::invalid_argument("unknown backend " + spec);

    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    json j = json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("rules"))
        return std::make_shared<ScriptedBackend>(ScriptedBackend::from_json(j));
    return std::make_shared<ReplayBackend>(read_tape(file));
}

}  // namespace questforge
