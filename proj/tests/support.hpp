#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "questforge/llm.hpp"
#include "questforge/session.hpp"

namespace testing_support {

inline std::filesystem::path data_dir() { return QUESTFORGE_DATA_DIR; }

inline std::filesystem::path walkthrough_script() { return data_dir() / "walkthrough" / "backend.json"; }
inline std::filesystem::path walkthrough_player() { return data_dir() / "walkthrough" / "player.jsonl"; }

/// Every session log a test writes goes here; the acceptance run verifies them all.
inline std::filesystem::path log_dir() {
    std::filesystem::path dir = QUESTFORGE_TEST_LOG_DIR;
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path log_file(const std::string& name) { return log_dir() / (name + ".jsonl"); }

inline std::shared_ptr<questforge::ScriptedBackend> walkthrough_backend() {
    return std::make_shared<questforge::ScriptedBackend>(
        questforge::ScriptedBackend::load(walkthrough_script()));
}

inline questforge::ScriptRule rule(std::string substring, std::string response,
                                   questforge::ScriptRule::Target target = questforge::ScriptRule::Target::player) {
    questforge::ScriptRule r;
    r.match = questforge::ScriptRule::Match::substring;
    r.value = std::move(substring);
    r.response = std::move(response);
    r.target = target;
    return r;
}

/// Counts completions and remembers every prompt it was sent.
class SpyBackend : public questforge::LlmBackend {
public:
    explicit SpyBackend(std::shared_ptr<questforge::LlmBackend> inner) : inner_(std::move(inner)) {}

    std::string complete(const questforge::PromptDocument& doc,
                         const questforge::CompletionParams& params) override {
        prompts.push_back(doc);
        return inner_->complete(doc, params);
    }

    std::vector<questforge::PromptDocument> prompts;

private:
    std::shared_ptr<questforge::LlmBackend> inner_;
};

/// Fails every call with the given error kind.
class FailingBackend : public questforge::LlmBackend {
public:
    explicit FailingBackend(questforge::LlmErrorKind kind) : kind_(kind) {}
    std::string complete(const questforge::PromptDocument&, const questforge::CompletionParams&) override {
        ++calls;
        throw questforge::LlmError(kind_, "simulated failure");
    }
    int calls = 0;

private:
    questforge::LlmErrorKind kind_;
};

}  // namespace testing_support
