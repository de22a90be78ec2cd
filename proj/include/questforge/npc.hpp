#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "questforge/llm.hpp"
#include "questforge/registry.hpp"
#include "questforge/world.hpp"

namespace questforge {

struct FewShotCall {
    std::string player;
    std::string function;  // a full "Function: [...]" line
};

struct FewShotReturn {
    std::string returns;
    std::string reply;
};

struct NpcProfile {
    EntityId id;
    std::string name;
    std::string game_setting;
    std::string opening_story;
    std::string persona;
    std::string backstory;
    std::string main_goal;
    Registry registry;
    std::vector<FewShotCall> call_examples;
    std::vector<FewShotReturn> return_examples;
    std::vector<std::string> constraints;
    std::string scene;

    /// Throws std::invalid_argument when a section is empty, the no-invention
    /// constraint is missing, or a few-shot names a function outside the registry.
    void validate() const;

    static NpcProfile from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static NpcProfile load(const std::filesystem::path& path);
};

/// Profiles shipped in data/npcs.
NpcProfile load_default_profile(const std::string& id);
std::filesystem::path default_data_dir();

enum class Speaker { player, npc, system };

struct ConversationTurn {
    int index = 0;
    Speaker speaker = Speaker::player;
    std::string text;
    /// Speech that came with the calls, before the results were known.
    std::string preface;
    std::vector<FunctionCall> calls;
    std::vector<FunctionResult> results;
    std::optional<std::string> subgoal;
    bool degraded = false;
};

struct ConversationState {
    NpcProfile profile;
    std::vector<ConversationTurn> turns;
    std::optional<std::string> active_subgoal;
    int exchange_count = 0;
    int k = 6;

    explicit ConversationState(NpcProfile p, int k_ = 6) : profile(std::move(p)), k(k_) {}
};

inline constexpr std::size_t kHistoryWindow = 40;
inline constexpr std::string_view kDegradedReply = "…";

/// The first-phase output of a turn, before the model has seen its results.
struct PendingAction {
    std::string speech;
    std::vector<FunctionCall> calls;
    std::vector<FunctionResult> results;
};

/// The profile block exactly as the prompt's first message.
std::string render_profile_block(const NpcProfile& profile);

/// System block, last kHistoryWindow turns, the pending action (speech and
/// calls as an npc message, one function_return message per result), then
/// the active sub-goal as a "[Sub-goal] ..." system directive.
PromptDocument assemble_prompt(const ConversationState& state, const PendingAction& pending = {});
PromptDocument assemble_prompt(const ConversationState& state,
                               const std::vector<FunctionResult>& pending_results);

/// Prompt for generateSubGoal: main goal plus the last K exchanges.
PromptDocument assemble_subgoal_prompt(const ConversationState& state);

/// One backend call as seen by the log.
struct Completion {
    std::string phase;  // act, speak, subgoal
    std::string digest;
    std::optional<std::string> reply;
    std::optional<LlmErrorKind> error;
    std::string error_message;
};

struct TurnReport {
    std::string preface;
    std::string reply;
    bool degraded = false;
    std::vector<FunctionCall> calls;
    std::vector<FunctionResult> results;
    /// World events drained right after each dispatched call.
    std::vector<std::vector<WorldEvent>> call_events;
    std::vector<Completion> completions;  // act/speak only
    std::optional<Completion> subgoal_completion;
    std::optional<std::string> subgoal;
    std::optional<std::string> subgoal_warning;
    std::vector<std::string> warnings;
    int exchange = 0;
};

/// Runs one player->NPC exchange: act, dispatch, speak with the results in
/// context, then a sub-goal every K exchanges. Backend failures degrade the
/// turn; ReplayError propagates.
TurnReport take_npc_turn(ConversationState& state, World& world, const std::string& utterance,
                         LlmBackend& backend, const CompletionParams& params = {});

/// Asks for a fresh sub-goal. On failure the active sub-goal is unchanged and
/// the completion carries the error.
std::optional<std::string> generate_subgoal(ConversationState& state, LlmBackend& backend,
                                            const CompletionParams& params, Completion& record,
                                            std::vector<std::string>& warnings);

}  // namespace questforge
