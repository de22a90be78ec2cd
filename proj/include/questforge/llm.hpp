#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace questforge {

// --- Prompt documents ---------------------------------------------------------

enum class Role { system, npc, player, function_return };

std::string_view name_of(Role role);
std::optional<Role> parse_role(std::string_view text);

struct PromptMessage {
    Role role = Role::system;
    std::string text;

    bool operator==(const PromptMessage&) const = default;
};

/// What gets sent to a chat model. `agent` names the NPC the prompt is for;
/// it never reaches the model but is part of the digest.
struct PromptDocument {
    std::string agent;
    std::vector<PromptMessage> messages;

    /// Plain-text form: system text verbatim, "Player: ...", "<agent>: ...",
    /// "Function_Returns: ..." lines.
    std::string render() const;
    /// SHA-256 (hex) of the canonical JSON of agent + messages.
    std::string digest() const;
    nlohmann::json to_json() const;

    bool operator==(const PromptDocument&) const = default;
};

struct CompletionParams {
    double temperature = 0.7;
    int max_tokens = 512;
    std::chrono::milliseconds timeout{30000};
};

// --- Errors -------------------------------------------------------------------

enum class LlmErrorKind { timeout, transport, auth, protocol, script };

std::string_view name_of(LlmErrorKind kind);
std::optional<LlmErrorKind> parse_llm_error_kind(std::string_view text);

/// A provider failed to produce a completion. Callers degrade gracefully.
class LlmError : public std::runtime_error {
public:
    LlmError(LlmErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    LlmErrorKind kind() const { return kind_; }

private:
    LlmErrorKind kind_;
};

/// A replay diverged from its tape. Never degraded; always surfaces.
class ReplayError : public std::runtime_error {
public:
    ReplayError(const std::string& message, std::size_t turn, std::optional<std::int64_t> seq)
        : std::runtime_error(message), turn_(turn), seq_(seq) {}
    std::size_t turn() const { return turn_; }
    std::optional<std::int64_t> seq() const { return seq_; }

private:
    std::size_t turn_;
    std::optional<std::int64_t> seq_;
};

// --- Providers ----------------------------------------------------------------

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    /// Returns raw model text or throws LlmError (ReplayError for tapes).
    virtual std::string complete(const PromptDocument& doc, const CompletionParams& params) = 0;
};

/// One rule of a scripted provider. Rules are tried in declaration order and
/// the first match answers.
struct ScriptRule {
    enum class Match { substring, pattern, turn };
    /// Which text a substring/pattern rule looks at. `player` and
    /// `function_return` only see the newest non-system message, and only when
    /// it has that role; `system` sees the newest system message.
    enum class Target { player, function_return, system, document };

    Match match = Match::substring;
    std::string value;  // substring or ECMAScript regex
    int turn = 0;       // 1-based call index for Match::turn
    Target target = Target::player;
    std::optional<std::string> npc;  // only prompts for this agent (case-insensitive)
    std::string response;
    bool once = false;
};

/// Deterministic table-lookup stand-in for a language model.
class ScriptedBackend : public LlmBackend {
public:
    explicit ScriptedBackend(std::vector<ScriptRule> rules,
                             std::optional<std::string> fallback = std::nullopt);

    /// {"rules": [{"match": {"substring"|"pattern"|"turn": ...}, "target": ..., "npc": ...,
    ///             "response": ..., "once": bool}], "fallback": "..."}
    static ScriptedBackend from_json(const nlohmann::json& j);
    static ScriptedBackend load(const std::filesystem::path& path);

    std::string complete(const PromptDocument& doc, const CompletionParams& params) override;
    int calls() const { return calls_; }

private:
    std::vector<ScriptRule> rules_;
    std::vector<bool> spent_;
    std::optional<std::string> fallback_;
    int calls_ = 0;
};

/// One recorded completion.
struct TapeEntry {
    std::string digest;
    std::optional<std::string> reply;
    std::optional<LlmErrorKind> error;
    std::string error_message;
    std::optional<std::int64_t> seq;  // log record that carried it, when known

    nlohmann::json to_json() const;
    static TapeEntry from_json(const nlohmann::json& j);
};

std::vector<TapeEntry> read_tape(const std::filesystem::path& path);

/// Wraps any provider and appends one JSON line {digest, reply} per call
/// (or {digest, error, message} when the inner provider failed).
class RecordingBackend : public LlmBackend {
public:
    RecordingBackend(std::shared_ptr<LlmBackend> inner,
                     std::optional<std::filesystem::path> tape_path = std::nullopt);

    std::string complete(const PromptDocument& doc, const CompletionParams& params) override;
    const std::vector<TapeEntry>& entries() const { return entries_; }

private:
    std::shared_ptr<LlmBackend> inner_;
    std::optional<std::ofstream> tape_;
    std::vector<TapeEntry> entries_;
    std::mutex mutex_;
};

/// Answers from a tape, in order. Throws ReplayError on digest mismatch or
/// when the tape runs out.
class ReplayBackend : public LlmBackend {
public:
    explicit ReplayBackend(std::vector<TapeEntry> tape) : tape_(std::move(tape)) {}

    std::string complete(const PromptDocument& doc, const CompletionParams& params) override;
    std::size_t position() const { return next_; }
    std::size_t size() const { return tape_.size(); }

private:
    std::vector<TapeEntry> tape_;
    std::size_t next_ = 0;
};

std::string sha256_hex(std::string_view data);

}  // namespace questforge
