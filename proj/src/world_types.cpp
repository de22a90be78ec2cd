#include "questforge/world.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <stdexcept>

#include "questforge/rules.hpp"

namespace questforge {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

constexpr std::array<std::string_view, 6> kBlockNames = {"air",   "dirt",    "cobblestone",
                                                         "stone", "oak_log", "bedrock"};
constexpr std::array<std::string_view, 13> kItemNames = {
    "dirt",         "cobblestone",   "stone",      "oak_log",       "wheat_seeds",
    "splash_potion", "iron_pickaxe", "stone_pickaxe", "iron_sword", "diamond_sword",
    "netherite_sword", "stick",      "bed"};
constexpr std::array<std::string_view, 5> kEntityNames = {"player", "npc", "spider", "zombie",
                                                          "creeper"};
constexpr std::array<std::string_view, 2> kTimeNames = {"day", "night"};
constexpr std::array<std::string_view, 2> kRegionNames = {"village", "island"};
constexpr std::array<std::string_view, 5> kDirectionNames = {"north", "south", "east", "west",
                                                             "up"};

}  // namespace

std::string_view name_of(BlockKind kind) { return kBlockNames[static_cast<std::size_t>(kind)]; }
std::string_view name_of(ItemKind kind) { return kItemNames[static_cast<std::size_t>(kind)]; }
std::string_view name_of(EntityKind kind) { return kEntityNames[static_cast<std::size_t>(kind)]; }
std::string_view name_of(TimeOfDay time) { return kTimeNames[static_cast<std::size_t>(time)]; }
std::string_view name_of(Region region) { return kRegionNames[static_cast<std::size_t>(region)]; }
std::string_view name_of(Direction dir) { return kDirectionNames[static_cast<std::size_t>(dir)]; }

std::optional<BlockKind> parse_block_kind(std::string_view text) {
    return lookup<BlockKind>(kBlockNames, text);
}
std::optional<ItemKind> parse_item_kind(std::string_view text) {
    return lookup<ItemKind>(kItemNames, text);
}
std::optional<EntityKind> parse_entity_kind(std::string_view text) {
    return lookup<EntityKind>(kEntityNames, text);
}
std::optional<Region> parse_region(std::string_view text) {
    return lookup<Region>(kRegionNames, text);
}
std::optional<Direction> parse_direction(std::string_view text) {
    return lookup<Direction>(kDirectionNames, text);
}

const std::vector<BlockKind>& all_block_kinds() {
    static const std::vector<BlockKind> kinds = [] {
        std::vector<BlockKind> v;
        for (std::size_t i = 0; i < kBlockNames.size(); ++i) v.push_back(static_cast<BlockKind>(i));
        return v;
    }();
    return kinds;
}

const std::vector<ItemKind>& all_item_kinds() {
    static const std::vector<ItemKind> kinds = [] {
        std::vector<ItemKind> v;
        for (std::size_t i = 0; i < kItemNames.size(); ++i) v.push_back(static_cast<ItemKind>(i));
        return v;
    }();
    return kinds;
}

bool is_mineable(BlockKind kind) {
    switch (kind) {
        case BlockKind::dirt:
        case BlockKind::cobblestone:
        case BlockKind::stone:
        case BlockKind::oak_log:
            return true;
        default:
            return false;
    }
}

bool is_mob(EntityKind kind) {
    return kind == EntityKind::spider || kind == EntityKind::zombie || kind == EntityKind::creeper;
}

std::optional<BlockKind> block_for_item(ItemKind item) {
    switch (item) {
        case ItemKind::dirt: return BlockKind::dirt;
        case ItemKind::cobblestone: return BlockKind::cobblestone;
        case ItemKind::stone: return BlockKind::stone;
        case ItemKind::oak_log: return BlockKind::oak_log;
        default: return std::nullopt;
    }
}

std::optional<ItemKind> item_for_block(BlockKind block) {
    switch (block) {
        case BlockKind::dirt: return ItemKind::dirt;
        case BlockKind::cobblestone: return ItemKind::cobblestone;
        case BlockKind::stone: return ItemKind::stone;
        case BlockKind::oak_log: return ItemKind::oak_log;
        default: return std::nullopt;
    }
}

int distance_sq(const Position& a, const Position& b) {
    const int dx = a.x - b.x;
    const int dy = a.y - b.y;
    const int dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

int manhattan(const Position& a, const Position& b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
}

bool in_bounds(const Position& p) {
    return p.x >= 0 && p.x < rules::kWorldWidth && p.y >= 0 && p.y < rules::kWorldHeight &&
           p.z >= 0 && p.z < rules::kWorldDepth;
}

bool in_region(Region region, const Position& p) {
    if (!in_bounds(p)) return false;
    switch (region) {
        case Region::village:
            return p.y < rules::kVillageMaxY;
        case Region::island:
            return p.y >= rules::kIslandMinRegionY && p.x >= rules::kIslandMinX &&
                   p.x < rules::kIslandMaxX && p.z >= rules::kIslandMinZ &&
                   p.z < rules::kIslandMaxZ;
    }
    return false;
}

// --- Inventory --------------------------------------------------------------

Inventory::Inventory(std::initializer_list<std::pair<ItemKind, int>> items) {
    for (const auto& [kind, n] : items) add(kind, n);
}

int Inventory::count(ItemKind kind) const {
    for (const auto& [k, n] : entries_) {
        if (k == kind) return n;
    }
    return 0;
}

int Inventory::total() const {
    int sum = 0;
    for (const auto& entry : entries_) sum += entry.second;
    return sum;
}

void Inventory::add(ItemKind kind, int n) {
    if (n <= 0) return;
    for (auto& [k, count] : entries_) {
        if (k == kind) {
            count += n;
            return;
        }
    }
    entries_.emplace_back(kind, n);
}

bool Inventory::remove(ItemKind kind, int n) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [kind](const auto& e) { return e.first == kind; });
    if (it == entries_.end() || it->second < n) return false;
    it->second -= n;
    if (it->second == 0) entries_.erase(it);
    return true;
}

std::string Inventory::describe() const {
    std::string out;
    for (const auto& [kind, n] : entries_) {
        if (!out.empty()) out += ", ";
        out += std::to_string(n);
        out += ' ';
        out += name_of(kind);
    }
    return out;
}

// --- BlockGrid --------------------------------------------------------------

namespace {
std::size_t cell_index(const Position& p) {
    return (static_cast<std::size_t>(p.y) * rules::kWorldDepth + p.z) * rules::kWorldWidth + p.x;
}
}  // namespace

BlockGrid::BlockGrid()
    : cells_(static_cast<std::size_t>(rules::kWorldWidth) * rules::kWorldHeight *
                 rules::kWorldDepth,
             BlockKind::air) {}

BlockKind BlockGrid::at(const Position& p) const {
    if (!in_bounds(p)) return BlockKind::air;
    return cells_[cell_index(p)];
}

void BlockGrid::set(const Position& p, BlockKind kind) {
    if (!in_bounds(p)) throw std::out_of_range("block position outside the world");
    cells_[cell_index(p)] = kind;
}

// --- WorldState -------------------------------------------------------------

TimeOfDay WorldState::time_of_day() const {
    return (day_clock / rules::kDayLengthTicks) % 2 == 0 ? TimeOfDay::day : TimeOfDay::night;
}

const Entity* WorldState::find(const EntityId& id) const {
    auto it = entities.find(id);
    return it == entities.end() ? nullptr : &it->second;
}

Entity* WorldState::find(const EntityId& id) {
    auto it = entities.find(id);
    return it == entities.end() ? nullptr : &it->second;
}

const Entity& WorldState::player() const {
    const Entity* p = find(kPlayerId);
    if (p == nullptr) throw std::logic_error("world has no player");
    return *p;
}

}  // namespace questforge
