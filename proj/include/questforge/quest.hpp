#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "questforge/world.hpp"

namespace questforge {

enum class QuestStep { TalkElena, CollectMaterials, BuildPath, FightSpiders, TalkAlaric, FindSword, GiveSword };

inline constexpr std::size_t kQuestSteps = 7;
inline constexpr int kMaterialsNeeded = 16;
inline constexpr int kSpiderRadius = 10;

std::string_view name_of(QuestStep step);
char letter_of(QuestStep step);  // 'a'..'g'
std::optional<QuestStep> parse_quest_step(std::string_view letter_or_name);
const std::array<QuestStep, kQuestSteps>& all_quest_steps();

/// Per-session completion state, folded from world events and exchanges.
class QuestProgress {
public:
    /// Returns the steps this event completed, in order.
    std::vector<QuestStep> observe(const WorldEvent& ev, std::int64_t tick);
    /// A completed player<->NPC exchange.
    std::vector<QuestStep> observe_exchange(const EntityId& npc, std::int64_t tick);

    const std::optional<std::int64_t>& stamp(QuestStep step) const {
        return stamps_[static_cast<std::size_t>(step)];
    }
    bool completed(QuestStep step) const { return stamp(step).has_value(); }
    bool complete() const { return completed(QuestStep::GiveSword); }
    /// Alaric died before the player talked to him.
    bool failed() const { return failed_; }
    std::size_t completed_count() const;
    std::optional<QuestStep> next_step() const;

    nlohmann::json to_json() const;

    bool operator==(const QuestProgress&) const = default;

private:
    struct Edge {
        bool talked_elena = false;
        bool talked_alaric = false;
        bool sword_to_alaric = false;
    };

    std::vector<QuestStep> advance(std::int64_t tick, const Edge& edge);
    bool holds(QuestStep step, const Edge& edge) const;

    std::array<std::optional<std::int64_t>, kQuestSteps> stamps_{};
    bool failed_ = false;

    std::map<ItemKind, int> player_items_;
    int blocks_placed_ = 0;
    std::optional<Position> player_at_;
    std::optional<Position> alaric_spawn_;
    std::map<EntityId, Position> spider_spawns_;
    std::set<EntityId> dead_;
};

// --- funnel -----------------------------------------------------------------

struct FunnelReport {
    std::array<int, kQuestSteps> per_step{};
    int total = 0;
    int skipped = 0;
    double success_rate = 0.0;
    /// False when there were no sessions; success_rate is then reported as 0.
    bool rate_defined = false;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
    /// Aligned bar table, one row per step, then the success rate.
    std::string to_text() const;
};

/// Folds session logs one at a time.
class FunnelBuilder {
public:
    /// Reads one session log (JSON Lines). A malformed line skips the session.
    void add_session(std::istream& in, const std::string& name);
    void add_file(const std::filesystem::path& path);
    FunnelReport report() const;

private:
    FunnelReport report_;
};

FunnelReport funnel(const std::vector<std::filesystem::path>& logs);

}  // namespace questforge
