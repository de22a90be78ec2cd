#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace questforge {

// ---------------------------------------------------------------------------
// Enumerations and their wire names
// ---------------------------------------------------------------------------

enum class BlockKind : std::uint8_t { air, dirt, cobblestone, stone, oak_log, bedrock };

enum class ItemKind : std::uint8_t {
    dirt,
    cobblestone,
    stone,
    oak_log,
    wheat_seeds,
    splash_potion,
    iron_pickaxe,
    stone_pickaxe,
    iron_sword,
    diamond_sword,
    netherite_sword,
    stick,
    bed,
};

enum class EntityKind : std::uint8_t { player, npc, spider, zombie, creeper };

enum class TimeOfDay : std::uint8_t { day, night };

enum class Region : std::uint8_t { village, island };

enum class Direction : std::uint8_t { north, south, east, west, up };

std::string_view name_of(BlockKind kind);
std::string_view name_of(ItemKind kind);
std::string_view name_of(EntityKind kind);
std::string_view name_of(TimeOfDay time);
std::string_view name_of(Region region);
std::string_view name_of(Direction dir);

std::optional<BlockKind> parse_block_kind(std::string_view text);
std::optional<ItemKind> parse_item_kind(std::string_view text);
std::optional<EntityKind> parse_entity_kind(std::string_view text);
std::optional<Region> parse_region(std::string_view text);
std::optional<Direction> parse_direction(std::string_view text);

const std::vector<BlockKind>& all_block_kinds();
const std::vector<ItemKind>& all_item_kinds();

bool is_mineable(BlockKind kind);
bool is_mob(EntityKind kind);
/// Block items that can be placed back into the world.
std::optional<BlockKind> block_for_item(ItemKind item);
std::optional<ItemKind> item_for_block(BlockKind block);

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

struct Position {
    int x = 0;
    int y = 0;
    int z = 0;

    auto operator<=>(const Position&) const = default;
};

int distance_sq(const Position& a, const Position& b);
int manhattan(const Position& a, const Position& b);
inline bool within(const Position& a, const Position& b, int radius) {
    return distance_sq(a, b) <= radius * radius;
}
bool in_bounds(const Position& p);
bool in_region(Region region, const Position& p);

// ---------------------------------------------------------------------------
// Containers and entities
// ---------------------------------------------------------------------------

/// Multiset of items that remembers insertion order, so listings read the
/// way the contents were put in ("1 stone_pickaxe, 64 cobblestone").
class Inventory {
public:
    Inventory() = default;
    Inventory(std::initializer_list<std::pair<ItemKind, int>> items);

    int count(ItemKind kind) const;
    int total() const;
    bool empty() const { return entries_.empty(); }
    void add(ItemKind kind, int n = 1);
    /// Removes n items; returns false (and changes nothing) if fewer are held.
    bool remove(ItemKind kind, int n = 1);
    const std::vector<std::pair<ItemKind, int>>& entries() const { return entries_; }
    std::string describe() const;

    bool operator==(const Inventory&) const = default;

private:
    std::vector<std::pair<ItemKind, int>> entries_;
};

using EntityId = std::string;

struct Entity {
    EntityId id;
    EntityKind kind = EntityKind::player;
    std::string name;
    Position position;
    int health = 0;
    std::optional<ItemKind> equipped;
    Inventory inventory;

    std::optional<Region> confined_to;  // NPCs never leave their region
    std::optional<Position> post;       // mobs wander around this point when idle
    std::optional<EntityId> target;     // mobs: whom they are chasing this tick
    bool following = false;             // NPCs: followPlayer flag

    bool alive() const { return health > 0; }
};

class BlockGrid {
public:
    BlockGrid();
    BlockKind at(const Position& p) const;  // out of bounds reads as air
    void set(const Position& p, BlockKind kind);
    bool solid(const Position& p) const { return at(p) != BlockKind::air; }
    const std::vector<BlockKind>& cells() const { return cells_; }

    bool operator==(const BlockGrid&) const = default;

private:
    std::vector<BlockKind> cells_;
};

struct WorldState {
    std::uint64_t seed = 0;
    std::int64_t tick = 0;
    int day_clock = 0;  // ticks since the last dawn
    BlockGrid blocks;
    std::map<EntityId, Entity> entities;
    std::map<Position, Inventory> chests;
    std::map<Position, Inventory> ground;
    std::minstd_rand rng;

    TimeOfDay time_of_day() const;
    const Entity* find(const EntityId& id) const;
    Entity* find(const EntityId& id);
    const Entity& player() const;
};

inline const EntityId kPlayerId = "player";
inline const EntityId kElenaId = "elena";
inline const EntityId kAlaricId = "alaric";

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

namespace event {

struct Spawned {
    EntityId id;
    EntityKind kind;
    std::string name;
    Position at;
    int health;
};
struct Moved {
    EntityId id;
    Position from;
    Position to;
};
struct Damaged {
    EntityId target;
    EntityId source;
    int amount;
    int health;
};
struct Died {
    EntityId id;
    EntityKind kind;
    Position at;
};
struct InventoryChanged {
    EntityId id;
    ItemKind item;
    int delta;
    int count;
};
struct BlockChanged {
    EntityId actor;
    Position at;
    BlockKind before;
    BlockKind after;
};
struct ChestChanged {
    Position at;
    ItemKind item;
    int delta;
    int count;
};
struct GroundChanged {
    Position at;
    ItemKind item;
    int delta;
    int count;
};
struct Transferred {
    EntityId from;
    EntityId to;
    ItemKind item;
};
struct Pointed {
    EntityId id;
    std::string location;
};
struct Equipped {
    EntityId id;
    ItemKind item;
};
struct TimeChanged {
    TimeOfDay time;
};

}  // namespace event

using WorldEvent =
    std::variant<event::Spawned, event::Moved, event::Damaged, event::Died,
                 event::InventoryChanged, event::BlockChanged, event::ChestChanged,
                 event::GroundChanged, event::Transferred, event::Pointed,
                 event::Equipped, event::TimeChanged>;

nlohmann::json to_json(const WorldEvent& ev);
/// Throws std::invalid_argument on unknown or malformed payloads.
WorldEvent world_event_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// World
// ---------------------------------------------------------------------------

/// Outcome of an in-game action. Failures always carry a non-empty text.
struct ActionResult {
    bool ok = false;
    std::string text;

    static ActionResult success(std::string text) { return {true, std::move(text)}; }
    static ActionResult failure(std::string text) { return {false, std::move(text)}; }
};

/// The simulated world plus an outbox of the events its mutations produced.
/// Single writer: callers serialize all access to one instance.
class World {
public:
    /// Village, floating island, both NPCs, mobs and chests. Deterministic per seed.
    static World create(std::uint64_t seed);

    explicit World(WorldState state) : state_(std::move(state)) {}

    const WorldState& state() const { return state_; }
    /// Direct access for fixtures and tests. Does not emit events.
    WorldState& mutable_state() { return state_; }

    /// Advances one tick. The returned events are also queued in the outbox.
    std::vector<WorldEvent> tick();

    // NPC skills
    ActionResult mine_block(const EntityId& actor, BlockKind kind);
    ActionResult drop_item(const EntityId& actor, ItemKind kind);
    ActionResult go_to_player(const EntityId& actor);
    ActionResult follow_player(const EntityId& actor);
    ActionResult point_to_location(const EntityId& actor, std::string_view location);
    ActionResult equip_item(const EntityId& actor, ItemKind kind);
    ActionResult attack_entity(const EntityId& actor, EntityKind kind);
    ActionResult defend_self(const EntityId& actor);
    ActionResult transfer_item(const EntityId& from, const EntityId& to, ItemKind kind);
    ActionResult query_chest(const EntityId& actor);

    // Player verbs
    ActionResult walk(const EntityId& actor, Direction dir);
    ActionResult place_block(const EntityId& actor, ItemKind item, Direction dir);
    ActionResult open_chest(const EntityId& actor);
    ActionResult sleep(const EntityId& actor);

    std::vector<WorldEvent> drain_events();
    bool has_pending_events() const { return !outbox_.empty(); }

    /// Canonical JSON (sorted keys); equal worlds serialize identically.
    nlohmann::json snapshot() const;
    std::string serialize() const { return snapshot().dump(); }

    /// Items held anywhere: inventories, chests and the ground.
    int total_items() const;

private:
    const Entity* living_actor(const EntityId& id, ActionResult& failure) const;
    void emit(WorldEvent ev);
    void damage(Entity& target, const EntityId& source, int amount);
    bool take_item(Entity& e, ItemKind kind);
    void give_item(Entity& e, ItemKind kind, int n = 1);
    std::optional<Position> resolve_walk(const Entity& e, int dx, int dz) const;
    void move_to(Entity& e, const Position& to);
    bool step_toward(Entity& e, const Position& goal);
    void pick_up(Entity& e);
    const Position* nearest_chest(const Position& from) const;
    Entity* nearest_mob(const Entity& actor, std::optional<EntityKind> kind,
                        bool only_aggroed_on_actor);
    void advance_clock();
    void act_mob(Entity& mob);

    WorldState state_;
    std::vector<WorldEvent> outbox_;
};

}  // namespace questforge
