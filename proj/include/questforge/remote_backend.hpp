#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "questforge/llm.hpp"

namespace questforge {

struct RemoteConfig {
    std::string api_key;
    std::string api_base = "https://api.openai.com/v1";
    std::string model = "gpt-4";
    /// Waits before the 1st and 2nd retry of a transport failure.
    std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(1000),
                                                   std::chrono::milliseconds(2000)};
};

/// Reads QUESTFORGE_API_KEY, QUESTFORGE_API_BASE and QUESTFORGE_MODEL.
/// Throws LlmError(auth) when no key is set.
RemoteConfig remote_config_from_env();

/// Chat-completions request body: system->system, npc->assistant,
/// player->user, function returns->user prefixed "Function_Returns: ".
nlohmann::json chat_request_body(const PromptDocument& doc, const CompletionParams& params,
                                 const std::string& model);

/// HTTP chat-completions client.
class RemoteBackend : public LlmBackend {
public:
    explicit RemoteBackend(RemoteConfig config) : config_(std::move(config)) {}

    std::string complete(const PromptDocument& doc, const CompletionParams& params) override;
    /// HTTP attempts made by the last complete() call.
    int last_attempts() const { return last_attempts_; }

private:
    RemoteConfig config_;
    int last_attempts_ = 0;
};

/// Builds a provider from a CLI spec: "remote", "scripted:<file>" (a rule
/// script, or a recorded JSON Lines tape), or "replay:<tape>".
std::shared_ptr<LlmBackend> make_backend(const std::string& spec);

}  // namespace questforge
