#include "questforge/world.hpp"

#include <algorithm>
#include <limits>

#include "questforge/rules.hpp"

namespace questforge {

namespace {

int sign(int v) { return (v > 0) - (v < 0); }

void fill_box(BlockGrid& grid, Position lo, Position hi, BlockKind kind) {
    for (int y = lo.y; y <= hi.y; ++y)
        for (int z = lo.z; z <= hi.z; ++z)
            for (int x = lo.x; x <= hi.x; ++x) grid.set({x, y, z}, kind);
}

// Hollow hut: cobblestone walls three blocks high, oak_log corners, a
// two-block doorway in the middle of one wall.
void build_house(BlockGrid& grid, int x0, int z0, int x1, int z1, Direction door) {
    const int base = rules::kVillageGroundY + 1;
    for (int y = base; y < base + 3; ++y) {
        for (int x = x0; x <= x1; ++x) {
            grid.set({x, y, z0}, BlockKind::cobblestone);
            grid.set({x, y, z1}, BlockKind::cobblestone);
        }
        for (int z = z0; z <= z1; ++z) {
            grid.set({x0, y, z}, BlockKind::cobblestone);
            grid.set({x1, y, z}, BlockKind::cobblestone);
        }
        for (auto [cx, cz] : {std::pair{x0, z0}, {x0, z1}, {x1, z0}, {x1, z1}})
            grid.set({cx, y, cz}, BlockKind::oak_log);
    }
    const int mx = (x0 + x1) / 2;
    const int mz = (z0 + z1) / 2;
    Position gap;
    switch (door) {
        case Direction::north: gap = {mx, base, z0}; break;
        case Direction::south: gap = {mx, base, z1}; break;
        case Direction::east: gap = {x1, base, mz}; break;
        default: gap = {x0, base, mz}; break;
    }
    grid.set(gap, BlockKind::air);
    grid.set({gap.x, gap.y + 1, gap.z}, BlockKind::air);
}

void plant_tree(BlockGrid& grid, int x, int z) {
    const int base = rules::kVillageGroundY + 1;
    for (int y = base; y < base + 4; ++y) grid.set({x, y, z}, BlockKind::oak_log);
}

// Seed-dependent scenery, kept inside two corners of the village that the
// quest never needs to cross.
void decorate(WorldState& s) {
    struct Zone {
        int x0, x1, z0, z1;
    };
    const Zone zones[] = {{36, 60, 2, 16}, {2, 16, 34, 60}};
    for (const Zone& zone : zones) {
        const int w = zone.x1 - zone.x0;
        const int d = zone.z1 - zone.z0;
        for (int i = 0; i < 3; ++i) {
            const int x = zone.x0 + static_cast<int>(s.rng() % w);
            const int z = zone.z0 + static_cast<int>(s.rng() % d);
            plant_tree(s.blocks, x, z);
        }
        for (int i = 0; i < 5; ++i) {
            const int x = zone.x0 + static_cast<int>(s.rng() % w);
            const int z = zone.z0 + static_cast<int>(s.rng() % d);
            const Position p{x, rules::kVillageGroundY + 1, z};
            if (s.blocks.at(p) == BlockKind::air)
                s.blocks.set(p, s.rng() % 2 == 0 ? BlockKind::stone : BlockKind::cobblestone);
        }
    }
}

Entity make_entity(EntityId id, EntityKind kind, std::string name, Position at, int health) {
    Entity e;
    e.id = std::move(id);
    e.kind = kind;
    e.name = std::move(name);
    e.position = at;
    e.health = health;
    return e;
}

Entity make_mob(EntityId id, EntityKind kind, Position at) {
    const int health = kind == EntityKind::spider   ? rules::kSpiderHealth
                       : kind == EntityKind::zombie ? rules::kZombieHealth
                                                    : rules::kCreeperHealth;
    Entity e = make_entity(std::move(id), kind, std::string(name_of(kind)), at, health);
    e.post = at;
    return e;
}

}  // namespace

World World::create(std::uint64_t seed) {
    WorldState s;
    s.seed = seed;
    s.rng.seed(static_cast<std::minstd_rand::result_type>(seed % std::minstd_rand::modulus));

    const int W = rules::kWorldWidth - 1;
    const int D = rules::kWorldDepth - 1;
    const int ground = rules::kVillageGroundY;
    fill_box(s.blocks, {0, 0, 0}, {W, 0, D}, BlockKind::bedrock);
    fill_box(s.blocks, {0, 1, 0}, {W, ground - 1, D}, BlockKind::stone);
    fill_box(s.blocks, {0, ground, 0}, {W, ground, D}, BlockKind::dirt);

    build_house(s.blocks, 6, 6, 12, 12, Direction::east);
    build_house(s.blocks, 40, 40, 46, 46, Direction::west);
    build_house(s.blocks, 48, 22, 54, 28, Direction::west);
    plant_tree(s.blocks, 18, 4);
    plant_tree(s.blocks, 4, 18);
    plant_tree(s.blocks, 24, 52);
    decorate(s);

    // Floating island: a dirt deck with a tapering stone underside.
    const int iy = rules::kIslandY;
    fill_box(s.blocks, {rules::kIslandMinX, iy, rules::kIslandMinZ},
             {rules::kIslandMaxX - 1, iy, rules::kIslandMaxZ - 1}, BlockKind::dirt);
    fill_box(s.blocks, {22, iy - 1, 22}, {41, iy - 1, 41}, BlockKind::stone);
    fill_box(s.blocks, {26, iy - 2, 26}, {37, iy - 2, 37}, BlockKind::stone);
    // Alaric's refuge: a two-block column the spiders cannot climb.
    s.blocks.set({38, iy + 1, 38}, BlockKind::cobblestone);
    s.blocks.set({38, iy + 2, 38}, BlockKind::cobblestone);
    s.blocks.set({42, iy + 1, 24}, BlockKind::stone);
    s.blocks.set({42, iy + 2, 24}, BlockKind::stone);

    Entity player = make_entity(kPlayerId, EntityKind::player, "Player", {17, ground + 1, 11},
                                rules::kPlayerHealth);

    Entity elena = make_entity(kElenaId, EntityKind::npc, "Elena", {14, ground + 1, 10},
                               rules::kNpcHealth);
    elena.inventory = {{ItemKind::iron_pickaxe, 1}, {ItemKind::splash_potion, 1}};
    elena.confined_to = Region::village;

    Entity alaric = make_entity(kAlaricId, EntityKind::npc, "Alaric", {38, iy + 3, 38},
                                rules::kNpcHealth);
    alaric.inventory = {
        {ItemKind::iron_sword, 1}, {ItemKind::stick, 4}, {ItemKind::netherite_sword, 1}};
    alaric.confined_to = Region::island;

    for (Entity* e : {&player, &elena, &alaric}) s.entities.emplace(e->id, std::move(*e));
    for (Entity mob : {make_mob("spider-1", EntityKind::spider, {40, iy + 1, 38}),
                       make_mob("spider-2", EntityKind::spider, {38, iy + 1, 41}),
                       make_mob("spider-3", EntityKind::spider, {35, iy + 1, 37}),
                       make_mob("zombie-1", EntityKind::zombie, {25, iy + 1, 23}),
                       make_mob("zombie-2", EntityKind::zombie, {23, iy + 1, 25})}) {
        s.entities.emplace(mob.id, std::move(mob));
    }

    s.chests[{13, ground + 1, 12}] = {{ItemKind::stone_pickaxe, 1}, {ItemKind::cobblestone, 64}};
    s.chests[{8, ground + 1, 8}] = {{ItemKind::bed, 1}, {ItemKind::wheat_seeds, 3}};
    s.chests[{36, iy + 1, 38}] = {{ItemKind::stick, 2}, {ItemKind::iron_pickaxe, 1}};
    s.chests[{23, iy + 1, 23}] = {{ItemKind::diamond_sword, 1}};

    World world(std::move(s));
    for (const auto& [id, e] : world.state_.entities)
        world.emit(event::Spawned{id, e.kind, e.name, e.position, e.health});
    return world;
}

// --- plumbing ---------------------------------------------------------------

void World::emit(WorldEvent ev) { outbox_.push_back(std::move(ev)); }

std::vector<WorldEvent> World::drain_events() {
    std::vector<WorldEvent> out;
    out.swap(outbox_);
    return out;
}

const Entity* World::living_actor(const EntityId& id, ActionResult& failure) const {
    const Entity* e = state_.find(id);
    if (e == nullptr) {
        failure = ActionResult::failure("no such entity " + id);
        return nullptr;
    }
    if (!e->alive()) {
        failure = ActionResult::failure(e->name + " is dead");
        return nullptr;
    }
    return e;
}

void World::damage(Entity& target, const EntityId& source, int amount) {
    if (!target.alive()) return;
    target.health = std::max(0, target.health - amount);
    emit(event::Damaged{target.id, source, amount, target.health});
    if (!target.alive()) {
        target.following = false;
        target.target.reset();
        emit(event::Died{target.id, target.kind, target.position});
    }
}

bool World::take_item(Entity& e, ItemKind kind) {
    if (!e.inventory.remove(kind)) return false;
    const int left = e.inventory.count(kind);
    if (left == 0 && e.equipped == kind) e.equipped.reset();
    emit(event::InventoryChanged{e.id, kind, -1, left});
    return true;
}

void World::give_item(Entity& e, ItemKind kind, int n) {
    e.inventory.add(kind, n);
    emit(event::InventoryChanged{e.id, kind, n, e.inventory.count(kind)});
}

std::optional<Position> World::resolve_walk(const Entity& e, int dx, int dz) const {
    const Position& from = e.position;
    auto standable = [&](const Position& p) {
        return in_bounds(p) && p.y > 0 && !state_.blocks.solid(p) &&
               state_.blocks.solid({p.x, p.y - 1, p.z});
    };
    auto allowed = [&](const Position& p) {
        return standable(p) && (!e.confined_to || in_region(*e.confined_to, p));
    };

    const Position level{from.x + dx, from.y, from.z + dz};
    if (allowed(level)) return level;
    for (int up = 1; up <= rules::kMaxStepUp; ++up) {
        const Position p{level.x, level.y + up, level.z};
        if (!state_.blocks.solid({from.x, from.y + up, from.z}) && allowed(p)) return p;
    }
    for (int down = 1; down <= rules::kMaxDrop; ++down) {
        const Position p{level.x, level.y - down, level.z};
        if (state_.blocks.solid({level.x, level.y - down + 1, level.z})) break;
        if (allowed(p)) return p;
    }
    return std::nullopt;
}

void World::move_to(Entity& e, const Position& to) {
    const Position from = e.position;
    e.position = to;
    emit(event::Moved{e.id, from, to});
    pick_up(e);
}

void World::pick_up(Entity& e) {
    if (e.kind != EntityKind::player && e.kind != EntityKind::npc) return;
    auto it = state_.ground.find(e.position);
    if (it == state_.ground.end()) return;
    const Inventory items = it->second;
    state_.ground.erase(it);
    for (const auto& [kind, n] : items.entries()) {
        emit(event::GroundChanged{e.position, kind, -n, 0});
        give_item(e, kind, n);
    }
}

// Greedy descent on manhattan distance; axes tried x before y before z.
// Walkers cannot move purely vertically, so the y axis only changes through
// step-ups and drops on the horizontal moves.
bool World::step_toward(Entity& e, const Position& goal) {
    const int current = manhattan(e.position, goal);
    const std::pair<int, int> axes[] = {{sign(goal.x - e.position.x), 0},
                                        {0, sign(goal.z - e.position.z)}};
    for (auto [dx, dz] : axes) {
        if (dx == 0 && dz == 0) continue;
        auto next = resolve_walk(e, dx, dz);
        if (next && manhattan(*next, goal) < current) {
            move_to(e, *next);
            return true;
        }
    }
    return false;
}

const Position* World::nearest_chest(const Position& from) const {
    const Position* best = nullptr;
    int best_d = std::numeric_limits<int>::max();
    for (const auto& [pos, items] : state_.chests) {
        const int d = distance_sq(pos, from);
        if (d <= rules::kChestRange * rules::kChestRange && d < best_d) {
            best = &pos;
            best_d = d;
        }
    }
    return best;
}

Entity* World::nearest_mob(const Entity& actor, std::optional<EntityKind> kind,
                           bool only_aggroed_on_actor) {
    Entity* best = nullptr;
    int best_d = std::numeric_limits<int>::max();
    for (auto& [id, e] : state_.entities) {
        if (!is_mob(e.kind) || !e.alive()) continue;
        if (kind && e.kind != *kind) continue;
        if (only_aggroed_on_actor && e.target != actor.id) continue;
        const int d = distance_sq(e.position, actor.position);
        if (d <= rules::kAttackRange * rules::kAttackRange && d < best_d) {
            best = &e;
            best_d = d;
        }
    }
    return best;
}

// --- tick ---------------------------------------------------------------------

void World::advance_clock() {
    const TimeOfDay before = state_.time_of_day();
    ++state_.tick;
    ++state_.day_clock;
    const TimeOfDay after = state_.time_of_day();
    if (after != before) emit(event::TimeChanged{after});
}

void World::act_mob(Entity& mob) {
    if (!mob.alive()) return;

    const Entity* target = nullptr;
    int best_d = rules::kAggroRadius * rules::kAggroRadius + 1;
    for (const auto& [id, other] : state_.entities) {
        if (other.kind != EntityKind::player && other.kind != EntityKind::npc) continue;
        if (!other.alive()) continue;
        const int d = distance_sq(other.position, mob.position);
        if (d < best_d) {
            target = &other;
            best_d = d;
        }
    }

    if (target != nullptr) {
        mob.target = target->id;
        if (manhattan(mob.position, target->position) <= 1) {
            damage(*state_.find(target->id), mob.id, rules::kMobDamage);
        } else {
            step_toward(mob, target->position);
        }
        return;
    }

    mob.target.reset();
    if (state_.rng() % rules::kWanderOneIn != 0) return;
    static constexpr std::pair<int, int> kSteps[] = {{0, -1}, {0, 1}, {1, 0}, {-1, 0}};
    const auto [dx, dz] = kSteps[state_.rng() % 4];
    auto next = resolve_walk(mob, dx, dz);
    if (next && (!mob.post || within(*next, *mob.post, rules::kGuardRadius))) move_to(mob, *next);
}

std::vector<WorldEvent> World::tick() {
    const std::size_t first = outbox_.size();
    advance_clock();

    const Entity* player = state_.find(kPlayerId);
    for (auto& [id, e] : state_.entities) {
        if (e.kind != EntityKind::npc || !e.alive() || !e.following) continue;
        if (player == nullptr || !player->alive()) break;
        if (!within(e.position, player->position, rules::kArrivalRadius))
            step_toward(e, player->position);
    }
    for (auto& [id, e] : state_.entities) {
        if (is_mob(e.kind)) act_mob(e);
    }
    return {outbox_.begin() + static_cast<std::ptrdiff_t>(first), outbox_.end()};
}

// --- NPC skills ---------------------------------------------------------------

ActionResult World::mine_block(const EntityId& actor_id, BlockKind kind) {
    ActionResult failure;
    const Entity* actor = living_actor(actor_id, failure);
    if (actor == nullptr) return failure;
    if (!is_mineable(kind)) return ActionResult::failure("cannot mine " + std::string(name_of(kind)));

    auto supports_someone = [&](const Position& p) {
        for (const auto& [id, e] : state_.entities) {
            if (e.alive() && e.position.x == p.x && e.position.y == p.y + 1 && e.position.z == p.z)
                return true;
        }
        return false;
    };

    const int r = rules::kMineRadius;
    const Position c = actor->position;
    std::optional<Position> best;
    int best_d = std::numeric_limits<int>::max();
    // Scan order is x, y, z ascending so ties resolve to the smallest coordinate.
    for (int x = c.x - r; x <= c.x + r; ++x)
        for (int y = c.y - r; y <= c.y + r; ++y)
            for (int z = c.z - r; z <= c.z + r; ++z) {
                const Position p{x, y, z};
                if (!in_bounds(p) || state_.blocks.at(p) != kind) continue;
                const int d = distance_sq(p, c);
                if (d > r * r || d >= best_d || supports_someone(p)) continue;
                best = p;
                best_d = d;
            }
    if (!best) return ActionResult::failure("no " + std::string(name_of(kind)) + " nearby");

    state_.blocks.set(*best, BlockKind::air);
    emit(event::BlockChanged{actor_id, *best, kind, BlockKind::air});
    give_item(*state_.find(actor_id), *item_for_block(kind));
    return ActionResult::success("mined successfully");
}

ActionResult World::drop_item(const EntityId& actor_id, ItemKind kind) {
    ActionResult failure;
    if (living_actor(actor_id, failure) == nullptr) return failure;
    Entity& actor = *state_.find(actor_id);
    if (!take_item(actor, kind))
        return ActionResult::failure("do not have " + std::string(name_of(kind)));
    Inventory& pile = state_.ground[actor.position];
    pile.add(kind);
    emit(event::GroundChanged{actor.position, kind, 1, pile.count(kind)});
    return ActionResult::success("dropped " + std::string(name_of(kind)));
}

ActionResult World::go_to_player(const EntityId& actor_id) {
    ActionResult failure;
    if (living_actor(actor_id, failure) == nullptr) return failure;
    const Entity* player = state_.find(kPlayerId);
    if (player == nullptr || !player->alive()) return ActionResult::failure("could not reach player");

    for (int elapsed = 0;; ++elapsed) {
        Entity& actor = *state_.find(actor_id);
        if (!actor.alive()) return ActionResult::failure(actor.name + " is dead");
        if (within(actor.position, player->position, rules::kArrivalRadius))
            return ActionResult::success("reached player");
        if (elapsed == rules::kGoToPlayerMaxTicks) break;
        step_toward(actor, player->position);
        tick();
    }
    return ActionResult::failure("could not reach player");
}

ActionResult World::follow_player(const EntityId& actor_id) {
    ActionResult failure;
    if (living_actor(actor_id, failure) == nullptr) return failure;
    state_.find(actor_id)->following = true;
    return ActionResult::success("following player");
}

ActionResult World::point_to_location(const EntityId& actor_id, std::string_view location) {
    ActionResult failure;
    if (living_actor(actor_id, failure) == nullptr) return failure;
    if (!parse_region(location))
        return ActionResult::failure("unknown location " + std::string(location));
    emit(event::Pointed{actor_id, std::string(location)});
    return ActionResult::success("pointed to " + std::string(location));
}

ActionResult World::equip_item(const EntityId& actor_id, ItemKind kind) {
    ActionResult failure;
    if (living_actor(actor_id, failure) == nullptr) return failure;
    Entity& actor = *state_.find(actor_id);
    if (actor.inventory.count(kind) == 0)
        return ActionResult::failure("do not have " + std::string(name_of(kind)));
    actor.equipped = kind;
    emit(event::Equipped{actor_id, kind});
    return ActionResult::success("equipped " + std::string(name_of(kind)));
}

ActionResult World::attack_entity(const EntityId& actor_id, EntityKind kind) {
    ActionResult failure;
    const Entity* actor = living_actor(actor_id, failure);
    if (actor == nullptr) return failure;
    if (!is_mob(kind)) return ActionResult::failure("cannot attack " + std::string(name_of(kind)));
    Entity* mob = nearest_mob(*actor, kind, false);
    if (mob == nullptr) return ActionResult::failure("no " + std::string(name_of(kind)) + " nearby");
    damage(*mob, actor_id, rules::kAttackDamage);
    return ActionResult::success((mob->alive() ? "attacked " : "killed ") +
                                 std::string(name_of(kind)));
}

ActionResult World::defend_self(const EntityId& actor_id) {
    ActionResult failure;
    const Entity* actor = living_actor(actor_id, failure);
    if (actor == nullptr) return failure;
    Entity* mob = nearest_mob(*actor, std::nullopt, true);
    if (mob == nullptr) return ActionResult::failure("no mobs attacking");
    damage(*mob, actor_id, rules::kAttackDamage);
    return ActionResult::success((mob->alive() ? "fought off " : "killed ") +
                                 std::string(name_of(mob->kind)));
}

ActionResult World::transfer_item(const EntityId& from_id, const EntityId& to_id, ItemKind kind) {
    ActionResult failure;
    if (living_actor(from_id, failure) == nullptr) return failure;
    if (living_actor(to_id, failure) == nullptr) return failure;
    Entity& from = *state_.find(from_id);
    Entity& to = *state_.find(to_id);
    if (from.inventory.count(kind) == 0)
        return ActionResult::failure("do not have " + std::string(name_of(kind)));
    if (!within(from.position, to.position, rules::kTransferRange))
        return ActionResult::failure("too far away");
    take_item(from, kind);
    give_item(to, kind);
    emit(event::Transferred{from_id, to_id, kind});
    return ActionResult::success("gave " + std::string(name_of(kind)) + " to " + to.name);
}

ActionResult World::query_chest(const EntityId& actor_id) {
    ActionResult failure;
    const Entity* actor = living_actor(actor_id, failure);
    if (actor == nullptr) return failure;
    const Position* chest = nearest_chest(actor->position);
    if (chest == nullptr) return ActionResult::failure("no chest nearby");
    const Inventory& items = state_.chests.at(*chest);
    return ActionResult::success(items.empty() ? "chest is empty" : items.describe());
}

// --- player verbs ---------------------------------------------------------------

ActionResult World::walk(const EntityId& actor_id, Direction dir) {
    ActionResult failure;
    const Entity* actor = living_actor(actor_id, failure);
    if (actor == nullptr) return failure;
    int dx = 0;
    int dz = 0;
    switch (dir) {
        case Direction::north: dz = -1; break;
        case Direction::south: dz = 1; break;
        case Direction::east: dx = 1; break;
        case Direction::west: dx = -1; break;
        case Direction::up: return ActionResult::failure("cannot walk up");
    }
    auto next = resolve_walk(*actor, dx, dz);
    if (!next) return ActionResult::failure("path blocked");
    move_to(*state_.find(actor_id), *next);
    return ActionResult::success("moved " + std::string(name_of(dir)));
}

ActionResult World::place_block(const EntityId& actor_id, ItemKind item, Direction dir) {
    ActionResult failure;
    if (living_actor(actor_id, failure) == nullptr) return failure;
    Entity& actor = *state_.find(actor_id);
    const auto block = block_for_item(item);
    if (!block) return ActionResult::failure("cannot place " + std::string(name_of(item)));
    if (actor.inventory.count(item) == 0)
        return ActionResult::failure("do not have " + std::string(name_of(item)));

    const Position at = actor.position;
    auto occupied = [&](const Position& p) {
        for (const auto& [id, e] : state_.entities)
            if (e.alive() && e.position == p) return true;
        return false;
    };

    if (dir == Direction::up) {
        // Jump and place the block where the feet were.
        const Position head{at.x, at.y + 1, at.z};
        if (!in_bounds(head) || state_.blocks.solid(head))
            return ActionResult::failure("no room to place");
        take_item(actor, item);
        move_to(actor, head);
        state_.blocks.set(at, *block);
        emit(event::BlockChanged{actor_id, at, BlockKind::air, *block});
        return ActionResult::success("placed " + std::string(name_of(item)));
    }

    Position target = at;
    switch (dir) {
        case Direction::north: target.z -= 1; break;
        case Direction::south: target.z += 1; break;
        case Direction::east: target.x += 1; break;
        default: target.x -= 1; break;
    }
    if (!in_bounds(target) || state_.blocks.solid(target) || occupied(target))
        return ActionResult::failure("no room to place");
    take_item(actor, item);
    state_.blocks.set(target, *block);
    emit(event::BlockChanged{actor_id, target, BlockKind::air, *block});
    return ActionResult::success("placed " + std::string(name_of(item)));
}

ActionResult World::open_chest(const EntityId& actor_id) {
    ActionResult failure;
    const Entity* actor = living_actor(actor_id, failure);
    if (actor == nullptr) return failure;
    const Position* chest = nearest_chest(actor->position);
    if (chest == nullptr) return ActionResult::failure("no chest nearby");
    const Position pos = *chest;
    const Inventory items = state_.chests.at(pos);
    if (items.empty()) return ActionResult::failure("chest is empty");
    state_.chests[pos] = Inventory{};
    Entity& e = *state_.find(actor_id);
    for (const auto& [kind, n] : items.entries()) {
        emit(event::ChestChanged{pos, kind, -n, 0});
        give_item(e, kind, n);
    }
    return ActionResult::success("took " + items.describe());
}

ActionResult World::sleep(const EntityId& actor_id) {
    ActionResult failure;
    const Entity* actor = living_actor(actor_id, failure);
    if (actor == nullptr) return failure;
    if (actor->inventory.count(ItemKind::bed) == 0) return ActionResult::failure("do not have bed");
    if (state_.time_of_day() != TimeOfDay::night)
        return ActionResult::failure("can only sleep at night");
    state_.day_clock = 0;
    emit(event::TimeChanged{TimeOfDay::day});
    return ActionResult::success("slept until morning");
}

int World::total_items() const {
    int sum = 0;
    for (const auto& [id, e] : state_.entities) sum += e.inventory.total();
    for (const auto& [pos, inv] : state_.chests) sum += inv.total();
    for (const auto& [pos, inv] : state_.ground) sum += inv.total();
    return sum;
}

}  // namespace questforge
