#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "questforge/llm.hpp"
#include "questforge/npc.hpp"
#include "questforge/quest.hpp"
#include "questforge/world.hpp"

namespace questforge {

// --- player commands ------------------------------------------------------------

enum class Verb { say, move, mine, place, attack, open, give, wait, sleep };

std::string_view name_of(Verb verb);
std::optional<Verb> parse_verb(std::string_view text);

struct Command {
    Verb verb = Verb::wait;
    std::string text;                 // say
    Direction dir = Direction::north;  // move, place
    int count = 1;                    // move steps, wait ticks
    std::string target;               // mine: block, place/give: item, attack: mob kind
    std::string to;                   // give: npc id

    /// {"type": "say", "text": ...}, {"type": "move", "dir": ..., "steps": n},
    /// {"type": "mine", "block": ...}, {"type": "place", "item": ..., "dir": ...},
    /// {"type": "attack", "target": ...}, {"type": "open"},
    /// {"type": "give", "to": ..., "item": ...}, {"type": "wait", "ticks": n}, {"type": "sleep"}
    nlohmann::json to_json() const;
    /// Throws std::invalid_argument on unknown verbs or bad fields.
    static Command from_json(const nlohmann::json& j);
    /// Terminal syntax: "say hello", "move north 3", "mine dirt",
    /// "place cobblestone up", "attack spider", "open", "give alaric diamond_sword",
    /// "wait 5", "sleep".
    static Command parse_line(std::string_view line);
};

/// Reads a JSON Lines command file.
std::vector<Command> load_commands(const std::filesystem::path& path);

// --- log records ----------------------------------------------------------------

struct LogRecord {
    std::string session;
    std::int64_t seq = 0;
    std::int64_t tick = 0;
    std::string kind;  // session, command, utterance, function_call, function_return,
                       // subgoal, world_event, quest_step, warning
    std::string actor;
    nlohmann::json payload = nlohmann::json::object();

    /// One JSON object, fields in the order session, seq, tick, kind, actor, payload.
    std::string to_line() const;
    /// Throws std::invalid_argument on malformed lines.
    static LogRecord from_line(const std::string& line);
};

std::vector<LogRecord> read_log(const std::filesystem::path& path);

// --- sessions -------------------------------------------------------------------

struct SessionConfig {
    std::uint64_t seed = 7;
    int k = 6;
    int turn_budget = 200;
    std::int64_t tick_budget = 5000;
    std::string session_id;  // defaults to "session-<seed>"
    CompletionParams params;
    std::map<EntityId, NpcProfile> npcs;  // defaults to the shipped profiles

    void validate() const;
};

inline constexpr int kHearingRadius = 8;

/// One serialized session loop: player commands in, log records out.
class Session {
public:
    Session(SessionConfig config, std::shared_ptr<LlmBackend> backend,
            std::optional<std::filesystem::path> log_path = std::nullopt);

    /// Runs one command and returns the records it produced. Throws
    /// std::logic_error once the session has ended; ReplayError propagates.
    std::vector<LogRecord> apply(const Command& command);
    /// Writes the end record. Idempotent.
    std::vector<LogRecord> finish(const std::string& reason);

    bool finished() const { return end_reason_.has_value(); }
    const std::optional<std::string>& end_reason() const { return end_reason_; }

    const World& world() const { return world_; }
    const QuestProgress& progress() const { return progress_; }
    const std::vector<LogRecord>& log() const { return log_; }
    std::string log_text() const;
    const SessionConfig& config() const { return config_; }
    const ConversationState& conversation(const EntityId& npc) const { return conversations_.at(npc); }
    int commands() const { return commands_; }

    /// Nearest living NPC within hearing range of the player, ties by name.
    std::optional<EntityId> listener() const;

private:
    LogRecord& emit(std::string kind, std::string actor, nlohmann::json payload);
    void emit_world_events(std::vector<WorldEvent> events);
    void emit_quest_steps(const std::vector<QuestStep>& steps);
    void npc_turn(const EntityId& npc, const std::string& utterance);
    void run_command(const Command& command, nlohmann::json& result);
    void check_end();

    SessionConfig config_;
    std::shared_ptr<LlmBackend> backend_;
    World world_;
    QuestProgress progress_;
    std::map<EntityId, ConversationState> conversations_;
    std::vector<LogRecord> log_;
    std::optional<std::ofstream> sink_;
    std::size_t batch_start_ = 0;
    int commands_ = 0;
    std::optional<std::string> end_reason_;
};

/// Runs commands until the session ends or the source is exhausted.
std::unique_ptr<Session> run_session(SessionConfig config, std::shared_ptr<LlmBackend> backend,
                                     const std::vector<Command>& commands,
                                     std::optional<std::filesystem::path> log_path = std::nullopt);

// --- replay ---------------------------------------------------------------------

class ReplayFailure : public std::runtime_error {
public:
    ReplayFailure(const std::string& message, std::optional<std::int64_t> seq)
        : std::runtime_error(message), seq_(seq) {}
    std::optional<std::int64_t> seq() const { return seq_; }

private:
    std::optional<std::int64_t> seq_;
};

struct ReplayResult {
    std::unique_ptr<Session> session;
    bool identical = false;
    std::optional<std::int64_t> first_difference;  // seq
};

/// Re-runs a session from its log with a tape built from the completions the
/// log carries. An empty log yields a fresh world from `fallback_seed`.
/// Throws ReplayFailure naming the seq on seq gaps, truncation, or tape
/// divergence.
ReplayResult replay(const std::vector<LogRecord>& log, std::uint64_t fallback_seed = 7);

}  // namespace questforge
