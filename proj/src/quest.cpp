#include "questforge/quest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace questforge {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kQuestSteps> kStepNames = {
    "TalkElena", "CollectMaterials", "BuildPath", "FightSpiders", "TalkAlaric", "FindSword", "GiveSword"};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view name_of(QuestStep step) { return kStepNames[static_cast<std::size_t>(step)]; }

char letter_of(QuestStep step) { return static_cast<char>('a' + static_cast<int>(step)); }

std::optional<QuestStep> parse_quest_step(std::string_view text) {
    if (text.size() == 1 && text[0] >= 'a' && text[0] < 'a' + static_cast<int>(kQuestSteps))
        return static_cast<QuestStep>(text[0] - 'a');
    for (std::size_t i = 0; i < kStepNames.size(); ++i)
        if (kStepNames[i] == text) return static_cast<QuestStep>(i);
    return std::nullopt;
}

const std::array<QuestStep, kQuestSteps>& all_quest_steps() {
    static const std::array<QuestStep, kQuestSteps> steps = {
        QuestStep::TalkElena, QuestStep::CollectMaterials, QuestStep::BuildPath, QuestStep::FightSpiders,
        QuestStep::TalkAlaric, QuestStep::FindSword, QuestStep::GiveSword};
    return steps;
}

// --- QuestProgress ----------------------------------------------------------------

std::vector<QuestStep> QuestProgress::observe(const WorldEvent& ev, std::int64_t tick) {
    Edge edge;
    std::visit(overloaded{
                   [&](const event::Spawned& e) {
                       if (e.id == kPlayerId) player_at_ = e.at;
                       if (e.id == kAlaricId) alaric_spawn_ = e.at;
                       if (e.kind == EntityKind::spider) spider_spawns_[e.id] = e.at;
                   },
                   [&](const event::Moved& e) {
                       if (e.id == kPlayerId) player_at_ = e.to;
                   },
                   [&](const event::Died& e) {
                       dead_.insert(e.id);
                       if (e.id == kAlaricId && !completed(QuestStep::TalkAlaric)) failed_ = true;
                   },
                   [&](const event::InventoryChanged& e) {
                       if (e.id == kPlayerId) player_items_[e.item] = e.count;
                   },
                   [&](const event::BlockChanged& e) {
                       if (e.actor == kPlayerId && e.before == BlockKind::air && e.after != BlockKind::air)
                           ++blocks_placed_;
                   },
                   [&](const event::Transferred& e) {
                       if (e.from == kPlayerId && e.to == kAlaricId && e.item == ItemKind::diamond_sword)
                           edge.sword_to_alaric = true;
                   },
                   [](const auto&) {},
               },
               ev);
    return advance(tick, edge);
}

std::vector<QuestStep> QuestProgress::observe_exchange(const EntityId& npc, std::int64_t tick) {
    Edge edge;
    edge.talked_elena = npc == kElenaId;
    edge.talked_alaric = npc == kAlaricId;
    return advance(tick, edge);
}

bool QuestProgress::holds(QuestStep step, const Edge& edge) const {
    switch (step) {
        case QuestStep::TalkElena:
            return edge.talked_elena;
        case QuestStep::CollectMaterials: {
            int blocks = 0;
            for (const auto& [item, count] : player_items_)
                if (block_for_item(item)) blocks += count;
            return blocks >= kMaterialsNeeded;
        }
        case QuestStep::BuildPath:
            return blocks_placed_ >= 1 && player_at_ && in_region(Region::island, *player_at_);
        case QuestStep::FightSpiders: {
            if (!alaric_spawn_) return false;
            for (const auto& [id, at] : spider_spawns_) {
                if (within(at, *alaric_spawn_, kSpiderRadius) && dead_.count(id) == 0) return false;
            }
            return true;
        }
        case QuestStep::TalkAlaric:
            return edge.talked_alaric;
        case QuestStep::FindSword: {
            auto it = player_items_.find(ItemKind::diamond_sword);
            return it != player_items_.end() && it->second >= 1;
        }
        case QuestStep::GiveSword:
            return edge.sword_to_alaric;
    }
    return false;
}

std::vector<QuestStep> QuestProgress::advance(std::int64_t tick, const Edge& edge) {
    std::vector<QuestStep> stamped;
    while (!failed_) {
        const auto next = next_step();
        if (!next || !holds(*next, edge)) break;
        stamps_[static_cast<std::size_t>(*next)] = tick;
        stamped.push_back(*next);
    }
    return stamped;
}

std::size_t QuestProgress::completed_count() const {
    std::size_t n = 0;
    for (const auto& s : stamps_) n += s.has_value() ? 1 : 0;
    return n;
}

std::optional<QuestStep> QuestProgress::next_step() const {
    for (QuestStep s : all_quest_steps())
        if (!completed(s)) return s;
    return std::nullopt;
}

json QuestProgress::to_json() const {
    json steps = json::array();
    for (QuestStep s : all_quest_steps()) {
        json j = {{"step", std::string(1, letter_of(s))}, {"name", name_of(s)}};
        j["tick"] = completed(s) ? json(*stamp(s)) : json(nullptr);
        steps.push_back(std::move(j));
    }
    return {{"steps", std::move(steps)}, {"complete", complete()}, {"failed", failed_}};
}

// --- funnel ---------------------------------------------------------------------

json FunnelReport::to_json() const {
    json steps = json::array();
    for (QuestStep s : all_quest_steps()) {
        steps.push_back({{"step", std::string(1, letter_of(s))},
                         {"name", name_of(s)},
                         {"count", per_step[static_cast<std::size_t>(s)]}});
    }
    return {{"total", total},
            {"skipped", skipped},
            {"steps", std::move(steps)},
            {"success_rate", success_rate},
            {"success_rate_defined", rate_defined},
            {"warnings", warnings}};
}

std::string FunnelReport::to_text() const {
    std::ostringstream out;
    out << "sessions: " << total;
    if (skipped > 0) out << " (skipped " << skipped << ")";
    out << '\n';
    for (QuestStep s : all_quest_steps()) {
        const int n = per_step[static_cast<std::size_t>(s)];
        out << '(' << letter_of(s) << ") " << std::left << std::setw(18) << name_of(s) << std::right
            << std::setw(4) << n << "  " << std::string(static_cast<std::size_t>(n), '#') << '\n';
    }
    out << "success rate: " << std::fixed << std::setprecision(2) << success_rate;
    if (!rate_defined) out << " (undefined, no sessions)";
    out << '\n';
    return out.str();
}

void FunnelBuilder::add_session(std::istream& in, const std::string& name) {
    std::array<bool, kQuestSteps> reached{};
    std::string line;
    std::size_t n = 0;
    try {
        while (std::getline(in, line)) {
            ++n;
            if (line.empty()) continue;
            const json rec = json::parse(line);
            for (const char* key : {"session", "seq", "tick", "kind", "actor", "payload"})
                if (!rec.contains(key)) throw std::invalid_argument(std::string("missing field ") + key);
            if (rec.at("kind") != "quest_step") continue;
            const auto step = parse_quest_step(rec.at("payload").at("step").get<std::string>());
            if (!step) throw std::invalid_argument("unknown quest step");
            reached[static_cast<std::size_t>(*step)] = true;
        }
    } catch (const std::exception& e) {
        ++report_.skipped;
        report_.warnings.push_back(name + ": line " + std::to_string(n) + ": " + e.what() + "; session skipped");
        return;
    }
    ++report_.total;
    for (std::size_t i = 0; i < kQuestSteps; ++i) report_.per_step[i] += reached[i] ? 1 : 0;
}

void FunnelBuilder::add_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        ++report_.skipped;
        report_.warnings.push_back(path.string() + ": cannot open; session skipped");
        return;
    }
    add_session(in, path.string());
}

FunnelReport FunnelBuilder::report() const {
    FunnelReport r = report_;
    r.rate_defined = r.total > 0;
    r.success_rate = r.rate_defined ? static_cast<double>(r.per_step[kQuestSteps - 1]) / r.total : 0.0;
    return r;
}

FunnelReport funnel(const std::vector<std::filesystem::path>& logs) {
    FunnelBuilder b;
    for (const auto& p : logs) b.add_file(p);
    return b.report();
}

}  // namespace questforge
