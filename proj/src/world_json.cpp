#include <sstream>
#include <stdexcept>

#include "questforge/rules.hpp"
#include "questforge/world.hpp"

namespace questforge {

using nlohmann::json;

namespace {

json pos_json(const Position& p) { return json::array({p.x, p.y, p.z}); }

Position pos_from(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("position must be [x, y, z]");
    return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()};
}

json inventory_json(const Inventory& inv) {
    json out = json::array();
    for (const auto& [kind, n] : inv.entries()) out.push_back(json::array({name_of(kind), n}));
    return out;
}

template <typename T>
T parse_or_throw(std::optional<T> v, const std::string& what) {
    if (!v) throw std::invalid_argument("unknown " + what);
    return *v;
}

ItemKind item_from(const json& j) { return parse_or_throw(parse_item_kind(j.get<std::string>()), "item"); }
BlockKind block_from(const json& j) {
    return parse_or_throw(parse_block_kind(j.get<std::string>()), "block");
}
EntityKind entity_kind_from(const json& j) {
    return parse_or_throw(parse_entity_kind(j.get<std::string>()), "entity kind");
}

struct EventToJson {
    json operator()(const event::Spawned& e) const {
        return {{"type", "spawned"}, {"id", e.id},          {"kind", name_of(e.kind)},
                {"name", e.name},    {"at", pos_json(e.at)}, {"health", e.health}};
    }
    json operator()(const event::Moved& e) const {
        return {{"type", "moved"}, {"id", e.id}, {"from", pos_json(e.from)}, {"to", pos_json(e.to)}};
    }
    json operator()(const event::Damaged& e) const {
        return {{"type", "damaged"},
                {"target", e.target},
                {"source", e.source},
                {"amount", e.amount},
                {"health", e.health}};
    }
    json operator()(const event::Died& e) const {
        return {{"type", "died"}, {"id", e.id}, {"kind", name_of(e.kind)}, {"at", pos_json(e.at)}};
    }
    json operator()(const event::InventoryChanged& e) const {
        return {{"type", "inventory"},
                {"id", e.id},
                {"item", name_of(e.item)},
                {"delta", e.delta},
                {"count", e.count}};
    }
    json operator()(const event::BlockChanged& e) const {
        return {{"type", "block"},
                {"actor", e.actor},
                {"at", pos_json(e.at)},
                {"before", name_of(e.before)},
                {"after", name_of(e.after)}};
    }
    json operator()(const event::ChestChanged& e) const {
        return {{"type", "chest"},
                {"at", pos_json(e.at)},
                {"item", name_of(e.item)},
                {"delta", e.delta},
                {"count", e.count}};
    }
    json operator()(const event::GroundChanged& e) const {
        return {{"type", "ground"},
                {"at", pos_json(e.at)},
                {"item", name_of(e.item)},
                {"delta", e.delta},
                {"count", e.count}};
    }
    json operator()(const event::Transferred& e) const {
        return {{"type", "transferred"}, {"from", e.from}, {"to", e.to}, {"item", name_of(e.item)}};
    }
    json operator()(const event::Pointed& e) const {
        return {{"type", "pointed"}, {"id", e.id}, {"location", e.location}};
    }
    json operator()(const event::Equipped& e) const {
        return {{"type", "equipped"}, {"id", e.id}, {"item", name_of(e.item)}};
    }
    json operator()(const event::TimeChanged& e) const {
        return {{"type", "time"}, {"time", name_of(e.time)}};
    }
};

}  // namespace

json to_json(const WorldEvent& ev) { return std::visit(EventToJson{}, ev); }

WorldEvent world_event_from_json(const json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "spawned")
            return event::Spawned{j.at("id").get<std::string>(), entity_kind_from(j.at("kind")),
                                  j.at("name").get<std::string>(), pos_from(j.at("at")),
                                  j.at("health").get<int>()};
        if (type == "moved")
            return event::Moved{j.at("id").get<std::string>(), pos_from(j.at("from")),
                                pos_from(j.at("to"))};
        if (type == "damaged")
            return event::Damaged{j.at("target").get<std::string>(),
                                  j.at("source").get<std::string>(), j.at("amount").get<int>(),
                                  j.at("health").get<int>()};
        if (type == "died")
            return event::Died{j.at("id").get<std::string>(), entity_kind_from(j.at("kind")),
                               pos_from(j.at("at"))};
        if (type == "inventory")
            return event::InventoryChanged{j.at("id").get<std::string>(), item_from(j.at("item")),
                                           j.at("delta").get<int>(), j.at("count").get<int>()};
        if (type == "block")
            return event::BlockChanged{j.at("actor").get<std::string>(), pos_from(j.at("at")),
                                       block_from(j.at("before")), block_from(j.at("after"))};
        if (type == "chest")
            return event::ChestChanged{pos_from(j.at("at")), item_from(j.at("item")),
                                       j.at("delta").get<int>(), j.at("count").get<int>()};
        if (type == "ground")
            return event::GroundChanged{pos_from(j.at("at")), item_from(j.at("item")),
                                        j.at("delta").get<int>(), j.at("count").get<int>()};
        if (type == "transferred")
            return event::Transferred{j.at("from").get<std::string>(),
                                      j.at("to").get<std::string>(), item_from(j.at("item"))};
        if (type == "pointed")
            return event::Pointed{j.at("id").get<std::string>(), j.at("location").get<std::string>()};
        if (type == "equipped")
            return event::Equipped{j.at("id").get<std::string>(), item_from(j.at("item"))};
        if (type == "time") {
            const std::string t = j.at("time").get<std::string>();
            if (t != "day" && t != "night") throw std::invalid_argument("unknown time of day");
            return event::TimeChanged{t == "day" ? TimeOfDay::day : TimeOfDay::night};
        }
        throw std::invalid_argument("unknown world event type " + type);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed world event: ") + e.what());
    }
}

json World::snapshot() const {
    const WorldState& s = state_;

    // Run-length encoding of the grid in (y, z, x) index order.
    json runs = json::array();
    const auto& cells = s.blocks.cells();
    for (std::size_t i = 0; i < cells.size();) {
        std::size_t j = i;
        while (j < cells.size() && cells[j] == cells[i]) ++j;
        runs.push_back(json::array({name_of(cells[i]), j - i}));
        i = j;
    }

    json entities = json::object();
    for (const auto& [id, e] : s.entities) {
        json ej = {{"kind", name_of(e.kind)},
                   {"name", e.name},
                   {"position", pos_json(e.position)},
                   {"health", e.health},
                   {"inventory", inventory_json(e.inventory)},
                   {"following", e.following}};
        ej["equipped"] = e.equipped ? json(name_of(*e.equipped)) : json(nullptr);
        ej["confined_to"] = e.confined_to ? json(name_of(*e.confined_to)) : json(nullptr);
        ej["post"] = e.post ? pos_json(*e.post) : json(nullptr);
        ej["target"] = e.target ? json(*e.target) : json(nullptr);
        entities[id] = std::move(ej);
    }

    auto containers = [](const std::map<Position, Inventory>& m) {
        json out = json::array();
        for (const auto& [pos, inv] : m)
            out.push_back({{"at", pos_json(pos)}, {"items", inventory_json(inv)}});
        return out;
    };

    std::ostringstream rng;
    rng << s.rng;

    return {{"seed", s.seed},
            {"tick", s.tick},
            {"day_clock", s.day_clock},
            {"time_of_day", name_of(s.time_of_day())},
            {"rng", rng.str()},
            {"dims", json::array({rules::kWorldWidth, rules::kWorldHeight, rules::kWorldDepth})},
            {"blocks", std::move(runs)},
            {"entities", std::move(entities)},
            {"chests", containers(s.chests)},
            {"ground", containers(s.ground)}};
}

}  // namespace questforge
