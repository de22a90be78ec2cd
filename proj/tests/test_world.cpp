#include <gtest/gtest.h>

#include <random>

#include "questforge/rules.hpp"
#include "questforge/world.hpp"

using namespace questforge;

namespace {

int count_blocks_within(const World& w, BlockKind kind, const Position& centre, int radius) {
    int n = 0;
    for (int y = 0; y < rules::kWorldHeight; ++y)
        for (int z = 0; z < rules::kWorldDepth; ++z)
            for (int x = 0; x < rules::kWorldWidth; ++x) {
                const Position p{x, y, z};
                if (w.state().blocks.at(p) == kind && distance_sq(p, centre) <= radius * radius) ++n;
            }
    return n;
}

template <class E>
std::vector<E> events_of(const std::vector<WorldEvent>& events) {
    std::vector<E> out;
    for (const auto& ev : events)
        if (const auto* e = std::get_if<E>(&ev)) out.push_back(*e);
    return out;
}

std::string dump(const std::vector<WorldEvent>& events) {
    std::string out;
    for (const auto& ev : events) out += to_json(ev).dump() + "\n";
    return out;
}

}  // namespace

TEST(CreateWorld, PlayerSpawnsNearElena) {
    World w = World::create(7);
    EXPECT_LE(distance_sq(w.state().find(kPlayerId)->position, w.state().find(kElenaId)->position), 25);
}

TEST(CreateWorld, InitialInventoriesAndChests) {
    World w = World::create(7);
    const WorldState& s = w.state();
    EXPECT_EQ(s.find(kElenaId)->inventory, Inventory({{ItemKind::iron_pickaxe, 1}, {ItemKind::splash_potion, 1}}));
    EXPECT_EQ(s.find(kAlaricId)->inventory,
              Inventory({{ItemKind::iron_sword, 1}, {ItemKind::stick, 4}, {ItemKind::netherite_sword, 1}}));

    const Position elena = s.find(kElenaId)->position;
    const Position alaric = s.find(kAlaricId)->position;
    bool village_chest = false, island_chest = false;
    for (const auto& [pos, inv] : s.chests) {
        if (within(pos, elena, rules::kChestRange) &&
            inv == Inventory({{ItemKind::stone_pickaxe, 1}, {ItemKind::cobblestone, 64}}))
            village_chest = true;
        if (within(pos, alaric, rules::kChestRange) &&
            inv == Inventory({{ItemKind::stick, 2}, {ItemKind::iron_pickaxe, 1}}))
            island_chest = true;
    }
    EXPECT_TRUE(village_chest);
    EXPECT_TRUE(island_chest);
}

TEST(CreateWorld, MobsAroundAlaricAndTheSwordChest) {
    World w = World::create(7);
    const WorldState& s = w.state();
    const Position alaric = s.find(kAlaricId)->position;
    int spiders = 0;
    for (const auto& [id, e] : s.entities)
        if (e.kind == EntityKind::spider && within(e.position, alaric, 10)) ++spiders;
    EXPECT_GE(spiders, 3);

    std::vector<Position> sword_chests;
    for (const auto& [pos, inv] : s.chests)
        if (inv.count(ItemKind::diamond_sword) > 0) sword_chests.push_back(pos);
    ASSERT_EQ(sword_chests.size(), 1u);
    EXPECT_EQ(s.chests.at(sword_chests[0]), Inventory({{ItemKind::diamond_sword, 1}}));
    int guards = 0;
    for (const auto& [id, e] : s.entities)
        if (e.kind == EntityKind::zombie && within(e.position, sword_chests[0], rules::kGuardRadius)) ++guards;
    EXPECT_GE(guards, 2);
    EXPECT_TRUE(in_region(Region::island, sword_chests[0]));
}

TEST(CreateWorld, RegionsAndPopulation) {
    World w = World::create(7);
    const WorldState& s = w.state();
    int players = 0, npcs = 0;
    for (const auto& [id, e] : s.entities) {
        players += e.kind == EntityKind::player;
        npcs += e.kind == EntityKind::npc;
    }
    EXPECT_EQ(players, 1);
    EXPECT_EQ(npcs, 2);
    EXPECT_EQ(s.find(kElenaId)->name, "Elena");
    EXPECT_EQ(s.find(kAlaricId)->name, "Alaric");
    EXPECT_TRUE(in_region(Region::village, s.find(kElenaId)->position));
    EXPECT_TRUE(in_region(Region::island, s.find(kAlaricId)->position));
    EXPECT_GT(rules::kIslandY, rules::kVillageGroundY);
}

TEST(CreateWorld, SameSeedSameWorld) {
    EXPECT_EQ(World::create(7).serialize(), World::create(7).serialize());
    EXPECT_NE(World::create(7).serialize(), World::create(8).serialize());
}

TEST(CreateWorld, SnapshotKeysAreSorted) {
    const nlohmann::json snap = World::create(7).snapshot();
    std::vector<std::string> keys;
    for (const auto& [k, v] : snap.items()) keys.push_back(k);
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    EXPECT_EQ(nlohmann::json::parse(snap.dump()), snap);
}

TEST(Tick, SpiderAdjacentToAlaricDealsFixedDamage) {
    World w = World::create(7);
    Entity& alaric = *w.mutable_state().find(kAlaricId);
    Entity& spider = *w.mutable_state().find("spider-1");
    spider.position = {alaric.position.x + 1, alaric.position.y, alaric.position.z};
    spider.post = spider.position;
    w.drain_events();

    const int before = alaric.health;
    const auto events = w.tick();
    const auto hits = events_of<event::Damaged>(events);
    int from_spider = 0;
    for (const auto& h : hits) {
        if (h.target == kAlaricId && h.source == "spider-1") {
            ++from_spider;
            EXPECT_EQ(h.amount, rules::kMobDamage);
        }
    }
    EXPECT_EQ(from_spider, 1);
    EXPECT_EQ(w.state().find(kAlaricId)->health, before - rules::kMobDamage);
    EXPECT_EQ(w.state().tick, 1);
}

TEST(Tick, NoMobsNoCombat) {
    World w = World::create(7);
    auto& entities = w.mutable_state().entities;
    for (auto it = entities.begin(); it != entities.end();) it = is_mob(it->second.kind) ? entities.erase(it) : std::next(it);
    w.drain_events();
    for (int i = 0; i < 100; ++i) {
        const auto events = w.tick();
        EXPECT_TRUE(events_of<event::Damaged>(events).empty());
        EXPECT_TRUE(events_of<event::Died>(events).empty());
    }
}

TEST(Tick, HundredTicksAreReproducible) {
    World a = World::create(7), b = World::create(7);
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(dump(a.tick()), dump(b.tick())) << "tick " << i;
        ASSERT_EQ(a.serialize(), b.serialize()) << "tick " << i;
    }
}

TEST(Tick, DeadEntitiesNeverAct) {
    World w = World::create(7);
    Entity& alaric = *w.mutable_state().find(kAlaricId);
    Entity& spider = *w.mutable_state().find("spider-1");
    spider.position = {alaric.position.x + 1, alaric.position.y, alaric.position.z};
    ASSERT_EQ(w.attack_entity(kAlaricId, EntityKind::spider).text, "attacked spider");
    ASSERT_EQ(w.attack_entity(kAlaricId, EntityKind::spider).text, "killed spider");
    w.drain_events();
    for (int i = 0; i < 200; ++i) {
        for (const auto& ev : w.tick()) {
            if (const auto* m = std::get_if<event::Moved>(&ev)) {
                EXPECT_NE(m->id, "spider-1");
            }
            if (const auto* d = std::get_if<event::Damaged>(&ev)) {
                EXPECT_NE(d->source, "spider-1");
            }
        }
    }
}

TEST(MineBlock, MinesNearestDirt) {
    World w = World::create(7);
    const Position at = w.state().find(kElenaId)->position;
    const int before = count_blocks_within(w, BlockKind::dirt, at, rules::kMineRadius);
    const ActionResult r = w.mine_block(kElenaId, BlockKind::dirt);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.text, "mined successfully");
    EXPECT_EQ(count_blocks_within(w, BlockKind::dirt, at, rules::kMineRadius), before - 1);
    EXPECT_EQ(w.state().find(kElenaId)->inventory.count(ItemKind::dirt), 1);
}

TEST(MineBlock, BedrockIsForbidden) {
    World w = World::create(7);
    const std::string before = w.serialize();
    const ActionResult r = w.mine_block(kElenaId, BlockKind::bedrock);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.text, "cannot mine bedrock");
    EXPECT_EQ(w.serialize(), before);
}

TEST(MineBlock, NoOakLogOnTheIsland) {
    World w = World::create(7);
    const Position at = w.state().find(kAlaricId)->position;
    ASSERT_EQ(count_blocks_within(w, BlockKind::oak_log, at, rules::kMineRadius), 0);
    const ActionResult r = w.mine_block(kAlaricId, BlockKind::oak_log);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.text, "no oak_log nearby");
}

TEST(DropItem, DropThenPickUpConservesItems) {
    World w = World::create(7);
    const int total = w.total_items();
    const ActionResult r = w.drop_item(kElenaId, ItemKind::iron_pickaxe);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.text, "dropped iron_pickaxe");
    EXPECT_EQ(w.total_items(), total);

    const ActionResult again = w.drop_item(kElenaId, ItemKind::iron_pickaxe);
    EXPECT_FALSE(again.ok);
    EXPECT_EQ(again.text, "do not have iron_pickaxe");

    // Player at (17,5,11), Elena at (14,5,10).
    for (int i = 0; i < 3; ++i) ASSERT_TRUE(w.walk(kPlayerId, Direction::west).ok);
    ASSERT_TRUE(w.walk(kPlayerId, Direction::north).ok);
    EXPECT_EQ(w.state().find(kPlayerId)->inventory.count(ItemKind::iron_pickaxe), 1);
    EXPECT_EQ(w.total_items(), total);
}

TEST(Actions, PointToLocation) {
    World w = World::create(7);
    w.drain_events();
    const ActionResult r = w.point_to_location(kElenaId, "island");
    EXPECT_TRUE(r.ok);
    const auto points = events_of<event::Pointed>(w.drain_events());
    ASSERT_EQ(points.size(), 1u);
    EXPECT_EQ(points[0].location, "island");

    const std::string before = w.serialize();
    const ActionResult bad = w.point_to_location(kElenaId, "castle");
    EXPECT_FALSE(bad.ok);
    EXPECT_FALSE(bad.text.empty());
    EXPECT_TRUE(w.drain_events().empty());
    EXPECT_EQ(w.serialize(), before);
}

TEST(Actions, EquipItem) {
    World w = World::create(7);
    EXPECT_TRUE(w.equip_item(kElenaId, ItemKind::iron_pickaxe).ok);
    EXPECT_EQ(w.state().find(kElenaId)->equipped, ItemKind::iron_pickaxe);
    const ActionResult r = w.equip_item(kElenaId, ItemKind::diamond_sword);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.text, "do not have diamond_sword");
}

TEST(Actions, TransferItem) {
    World w = World::create(7);
    EXPECT_EQ(w.transfer_item(kPlayerId, kAlaricId, ItemKind::diamond_sword).text, "do not have diamond_sword");

    Entity& player = *w.mutable_state().find(kPlayerId);
    player.inventory.add(ItemKind::diamond_sword);
    const Position alaric = w.state().find(kAlaricId)->position;
    player.position = {alaric.x + 10, alaric.y, alaric.z};
    ASSERT_EQ(distance_sq(player.position, alaric), 100);
    EXPECT_EQ(w.transfer_item(kPlayerId, kAlaricId, ItemKind::diamond_sword).text, "too far away");

    player.position = {37, 31, 38};
    w.drain_events();
    const ActionResult r = w.transfer_item(kPlayerId, kAlaricId, ItemKind::diamond_sword);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(w.state().find(kAlaricId)->inventory.count(ItemKind::diamond_sword), 1);
    EXPECT_EQ(w.state().find(kPlayerId)->inventory.count(ItemKind::diamond_sword), 0);
    EXPECT_EQ(events_of<event::Transferred>(w.drain_events()).size(), 1u);
}

TEST(Actions, QueryChest) {
    World w = World::create(7);
    // Oracle: the chest contents listed in queryChest format.
    std::string expected;
    const Position elena = w.state().find(kElenaId)->position;
    for (const auto& [pos, inv] : w.state().chests) {
        if (!within(pos, elena, rules::kChestRange)) continue;
        for (const auto& [item, n] : inv.entries()) {
            if (!expected.empty()) expected += ", ";
            expected += std::to_string(n) + " " + std::string(name_of(item));
        }
    }
    EXPECT_EQ(expected, "1 stone_pickaxe, 64 cobblestone");
    EXPECT_EQ(w.query_chest(kElenaId).text, expected);

    const ActionResult far = w.query_chest(kPlayerId);
    EXPECT_FALSE(far.ok);
    EXPECT_EQ(far.text, "no chest nearby");
}

TEST(Actions, GoToPlayer) {
    World w = World::create(7);
    EXPECT_EQ(w.go_to_player(kElenaId).text, "reached player");

    World island = World::create(7);
    auto& entities = island.mutable_state().entities;
    for (auto it = entities.begin(); it != entities.end();) it = is_mob(it->second.kind) ? entities.erase(it) : std::next(it);
    const auto start = island.state().tick;
    const ActionResult r = island.go_to_player(kAlaricId);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.text, "could not reach player");
    EXPECT_EQ(island.state().tick, start + rules::kGoToPlayerMaxTicks);
    EXPECT_TRUE(in_region(Region::island, island.state().find(kAlaricId)->position));
}

TEST(Actions, FollowAttackDefend) {
    World w = World::create(7);
    EXPECT_TRUE(w.follow_player(kElenaId).ok);
    EXPECT_TRUE(w.state().find(kElenaId)->following);

    const int before = w.state().find("spider-1")->health;
    EXPECT_TRUE(w.attack_entity(kAlaricId, EntityKind::spider).ok);
    int total = 0;
    for (const char* id : {"spider-1", "spider-2", "spider-3"}) total += w.state().find(id)->health;
    EXPECT_EQ(total, 3 * rules::kSpiderHealth - rules::kAttackDamage);
    (void)before;

    EXPECT_EQ(w.attack_entity(kElenaId, EntityKind::zombie).text, "no zombie nearby");
    EXPECT_EQ(w.defend_self(kElenaId).text, "no mobs attacking");
}

TEST(Actions, SleepNeedsBedAndNight) {
    World w = World::create(7);
    EXPECT_EQ(w.sleep(kPlayerId).text, "do not have bed");
    w.mutable_state().find(kPlayerId)->inventory.add(ItemKind::bed);
    EXPECT_FALSE(w.sleep(kPlayerId).ok);
    w.mutable_state().day_clock = rules::kDayLengthTicks + 1;
    ASSERT_EQ(w.state().time_of_day(), TimeOfDay::night);
    EXPECT_EQ(w.sleep(kPlayerId).text, "slept until morning");
    EXPECT_EQ(w.state().time_of_day(), TimeOfDay::day);
}

TEST(Actions, PlaceBlockUpRaisesThePlayer) {
    World w = World::create(7);
    w.mutable_state().find(kPlayerId)->inventory.add(ItemKind::cobblestone, 2);
    const Position start = w.state().find(kPlayerId)->position;
    const ActionResult r = w.place_block(kPlayerId, ItemKind::cobblestone, Direction::up);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(w.state().find(kPlayerId)->position.y, start.y + 1);
    EXPECT_EQ(w.state().blocks.at(start), BlockKind::cobblestone);
    EXPECT_EQ(w.state().find(kPlayerId)->inventory.count(ItemKind::cobblestone), 1);
}

TEST(Invariants, ConfinementHoldsUnderRandomWalks) {
    std::mt19937 rng(11);
    World w = World::create(7);
    const Direction dirs[] = {Direction::north, Direction::south, Direction::east, Direction::west};
    for (int i = 0; i < 3000; ++i) {
        w.walk(kElenaId, dirs[rng() % 4]);
        w.walk(kAlaricId, dirs[rng() % 4]);
        if (i % 7 == 0) w.tick();
        ASSERT_TRUE(in_region(Region::village, w.state().find(kElenaId)->position));
        ASSERT_TRUE(in_region(Region::island, w.state().find(kAlaricId)->position));
    }
}

TEST(Invariants, FailuresCarryText) {
    World w = World::create(7);
    for (BlockKind b : all_block_kinds()) {
        const ActionResult r = w.mine_block(kAlaricId, b);
        EXPECT_FALSE(r.text.empty());
    }
    for (ItemKind i : all_item_kinds()) {
        EXPECT_FALSE(w.drop_item(kPlayerId, i).text.empty());
        EXPECT_FALSE(w.equip_item(kPlayerId, i).text.empty());
    }
}
