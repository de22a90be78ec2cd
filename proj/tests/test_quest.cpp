#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "questforge/quest.hpp"
#include "questforge/session.hpp"

using namespace questforge;

namespace {

const Position kAlaricSpawn{38, 31, 38};
const Position kOnIsland{30, 31, 30};
const Position kInVillage{17, 5, 11};

/// Progress with the world's opening facts: player, Alaric and two spiders near him.
QuestProgress opened() {
    QuestProgress p;
    p.observe(event::Spawned{kPlayerId, EntityKind::player, "Player", kInVillage, 20}, 0);
    p.observe(event::Spawned{kAlaricId, EntityKind::npc, "Alaric", kAlaricSpawn, 20}, 0);
    p.observe(event::Spawned{"spider-1", EntityKind::spider, "spider", {37, 31, 38}, 8}, 0);
    p.observe(event::Spawned{"spider-2", EntityKind::spider, "spider", {36, 31, 36}, 8}, 0);
    p.observe(event::Spawned{"spider-far", EntityKind::spider, "spider", {5, 5, 5}, 8}, 0);
    return p;
}

void collect(QuestProgress& p, int n, std::int64_t tick) {
    p.observe(event::InventoryChanged{kPlayerId, ItemKind::cobblestone, n, n}, tick);
}

void reach_island(QuestProgress& p, std::int64_t tick) {
    p.observe(event::BlockChanged{kPlayerId, {30, 30, 30}, BlockKind::air, BlockKind::cobblestone}, tick);
    p.observe(event::Moved{kPlayerId, {30, 30, 30}, kOnIsland}, tick);
}

void kill_spiders(QuestProgress& p, std::int64_t tick) {
    p.observe(event::Died{"spider-1", EntityKind::spider, {37, 31, 38}}, tick);
    p.observe(event::Died{"spider-2", EntityKind::spider, {36, 31, 36}}, tick);
}

std::string quest_log(const std::vector<char>& letters) {
    std::ostringstream out;
    int seq = 0;
    for (char c : letters) {
        LogRecord r;
        r.session = "s";
        r.seq = seq++;
        r.kind = "quest_step";
        r.actor = kPlayerId;
        r.payload = {{"step", std::string(1, c)}, {"name", name_of(*parse_quest_step(std::string(1, c)))}};
        out << r.to_line() << '\n';
    }
    return out.str();
}

}  // namespace

TEST(Quest, StepNamesAndLetters) {
    for (QuestStep s : all_quest_steps()) {
        EXPECT_EQ(parse_quest_step(std::string(1, letter_of(s))), s);
        EXPECT_EQ(parse_quest_step(name_of(s)), s);
    }
    EXPECT_FALSE(parse_quest_step("h"));
    EXPECT_EQ(letter_of(QuestStep::GiveSword), 'g');
}

TEST(Quest, FullSequenceStampsEveryStep) {
    QuestProgress p = opened();
    EXPECT_EQ(p.observe_exchange(kElenaId, 1), std::vector<QuestStep>{QuestStep::TalkElena});
    collect(p, 15, 2);
    EXPECT_FALSE(p.completed(QuestStep::CollectMaterials));
    collect(p, 16, 3);
    EXPECT_EQ(p.stamp(QuestStep::CollectMaterials), 3);
    reach_island(p, 4);
    EXPECT_TRUE(p.completed(QuestStep::BuildPath));
    p.observe(event::Died{"spider-1", EntityKind::spider, {}}, 5);
    EXPECT_FALSE(p.completed(QuestStep::FightSpiders));
    p.observe(event::Died{"spider-2", EntityKind::spider, {}}, 6);
    EXPECT_EQ(p.stamp(QuestStep::FightSpiders), 6);
    p.observe_exchange(kAlaricId, 7);
    p.observe(event::InventoryChanged{kPlayerId, ItemKind::diamond_sword, 1, 1}, 8);
    p.observe(event::Transferred{kPlayerId, kAlaricId, ItemKind::diamond_sword}, 9);
    EXPECT_TRUE(p.complete());
    EXPECT_EQ(p.completed_count(), kQuestSteps);
    EXPECT_FALSE(p.next_step());
}

TEST(Quest, StepsOnlyCountInOrder) {
    QuestProgress p = opened();
    collect(p, 64, 1);
    reach_island(p, 2);
    kill_spiders(p, 3);
    EXPECT_EQ(p.completed_count(), 0u);
    EXPECT_EQ(p.next_step(), QuestStep::TalkElena);
    // Satisfied state predicates complete together once the prefix opens.
    const auto stamped = p.observe_exchange(kElenaId, 4);
    EXPECT_EQ(stamped, (std::vector<QuestStep>{QuestStep::TalkElena, QuestStep::CollectMaterials,
                                               QuestStep::BuildPath, QuestStep::FightSpiders}));
}

TEST(Quest, EdgeEventsAreNotRemembered) {
    QuestProgress p = opened();
    p.observe_exchange(kAlaricId, 1);
    p.observe_exchange(kElenaId, 2);
    collect(p, 16, 3);
    reach_island(p, 4);
    kill_spiders(p, 5);
    EXPECT_FALSE(p.completed(QuestStep::TalkAlaric));
    p.observe_exchange(kAlaricId, 6);
    EXPECT_TRUE(p.completed(QuestStep::TalkAlaric));
}

TEST(Quest, CompletionIsIdempotent) {
    QuestProgress p = opened();
    p.observe_exchange(kElenaId, 1);
    const QuestProgress once = p;
    EXPECT_TRUE(p.observe_exchange(kElenaId, 2).empty());
    EXPECT_EQ(p, once);
    EXPECT_EQ(p.stamp(QuestStep::TalkElena), 1);
}

TEST(Quest, OnlyPlacedBlockItemsCountAsMaterials) {
    QuestProgress p = opened();
    p.observe_exchange(kElenaId, 1);
    p.observe(event::InventoryChanged{kPlayerId, ItemKind::stick, 20, 20}, 2);
    p.observe(event::InventoryChanged{kElenaId, ItemKind::dirt, 20, 20}, 2);
    EXPECT_FALSE(p.completed(QuestStep::CollectMaterials));
    p.observe(event::InventoryChanged{kPlayerId, ItemKind::dirt, 10, 10}, 3);
    p.observe(event::InventoryChanged{kPlayerId, ItemKind::oak_log, 6, 6}, 4);
    EXPECT_EQ(p.stamp(QuestStep::CollectMaterials), 4);
}

TEST(Quest, ReachingTheIslandNeedsAPlacedBlock) {
    QuestProgress p = opened();
    p.observe_exchange(kElenaId, 1);
    collect(p, 16, 1);
    p.observe(event::Moved{kPlayerId, kInVillage, kOnIsland}, 2);
    EXPECT_FALSE(p.completed(QuestStep::BuildPath));
    p.observe(event::BlockChanged{kElenaId, {1, 5, 1}, BlockKind::air, BlockKind::dirt}, 3);
    p.observe(event::Moved{kPlayerId, kOnIsland, kOnIsland}, 3);
    EXPECT_FALSE(p.completed(QuestStep::BuildPath));
    reach_island(p, 4);
    EXPECT_TRUE(p.completed(QuestStep::BuildPath));
}

TEST(Quest, AlaricDyingFirstFailsTheQuest) {
    QuestProgress p = opened();
    p.observe_exchange(kElenaId, 1);
    p.observe(event::Died{kAlaricId, EntityKind::npc, kAlaricSpawn}, 2);
    EXPECT_TRUE(p.failed());
    collect(p, 16, 3);
    EXPECT_FALSE(p.completed(QuestStep::CollectMaterials));
    EXPECT_TRUE(p.to_json().at("failed").get<bool>());
}

TEST(Quest, ProgressJsonShape) {
    QuestProgress p = opened();
    p.observe_exchange(kElenaId, 5);
    const auto j = p.to_json();
    ASSERT_EQ(j.at("steps").size(), kQuestSteps);
    EXPECT_EQ(j.at("steps")[0].at("tick"), 5);
    EXPECT_TRUE(j.at("steps")[1].at("tick").is_null());
    EXPECT_FALSE(j.at("complete").get<bool>());
}

TEST(Funnel, EmptyInput) {
    const FunnelReport r = funnel({});
    EXPECT_EQ(r.total, 0);
    EXPECT_FALSE(r.rate_defined);
    EXPECT_EQ(r.success_rate, 0.0);
    EXPECT_NE(r.to_text().find("undefined"), std::string::npos);
}

TEST(Funnel, SingleSession) {
    FunnelBuilder b;
    std::istringstream in(quest_log({'a', 'b', 'c'}));
    b.add_session(in, "one");
    const FunnelReport r = b.report();
    EXPECT_EQ(r.total, 1);
    EXPECT_EQ(r.per_step, (std::array<int, kQuestSteps>{1, 1, 1, 0, 0, 0, 0}));
    EXPECT_TRUE(r.rate_defined);
    EXPECT_EQ(r.success_rate, 0.0);
}

TEST(Funnel, MalformedSessionIsSkipped) {
    FunnelBuilder b;
    std::istringstream bad(quest_log({'a'}) + "{not json\n");
    b.add_session(bad, "bad");
    std::istringstream good(quest_log({'a', 'b', 'c', 'd', 'e', 'f', 'g'}));
    b.add_session(good, "good");
    const FunnelReport r = b.report();
    EXPECT_EQ(r.total, 1);
    EXPECT_EQ(r.skipped, 1);
    EXPECT_EQ(r.per_step[0], 1);
    EXPECT_EQ(r.success_rate, 1.0);
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("bad"), std::string::npos);
}

TEST(Funnel, RandomCorporaAreMonotonic) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        FunnelBuilder b;
        std::array<int, kQuestSteps> expected{};
        const int sessions = 1 + static_cast<int>(rng() % 40);
        for (int s = 0; s < sessions; ++s) {
            const int reached = static_cast<int>(rng() % (kQuestSteps + 1));
            std::vector<char> letters;
            for (int i = 0; i < reached; ++i) {
                letters.push_back(static_cast<char>('a' + i));
                ++expected[static_cast<std::size_t>(i)];
            }
            std::istringstream in(quest_log(letters));
            b.add_session(in, "s" + std::to_string(s));
        }
        const FunnelReport r = b.report();
        EXPECT_EQ(r.per_step, expected);
        EXPECT_EQ(r.total, sessions);
        for (std::size_t i = 1; i < kQuestSteps; ++i) EXPECT_LE(r.per_step[i], r.per_step[i - 1]);
        EXPECT_DOUBLE_EQ(r.success_rate, static_cast<double>(expected[kQuestSteps - 1]) / sessions);
    }
}
