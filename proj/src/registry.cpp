#include "questforge/registry.hpp"

#include <algorithm>
#include <stdexcept>

namespace questforge {

namespace {

std::vector<std::string> names_of_items() {
    std::vector<std::string> out;
    for (ItemKind k : all_item_kinds()) out.emplace_back(name_of(k));
    return out;
}

std::vector<std::string> names_of_blocks() {
    std::vector<std::string> out;
    for (BlockKind k : all_block_kinds()) out.emplace_back(name_of(k));
    return out;
}

FunctionSpec spec(std::string name, std::vector<std::vector<std::string>> domain,
                  std::string description = {}) {
    FunctionSpec s;
    s.name = std::move(name);
    s.arity = static_cast<int>(domain.size());
    s.arg_domain = std::move(domain);
    s.description = std::move(description);
    return s;
}

const std::vector<FunctionSpec>& catalog() {
    static const std::vector<FunctionSpec> all = {
        spec("goToPlayer", {}),
        spec("followPlayer", {}),
        spec("pointToLocation", {{"village", "island"}}),
        spec("equipItem", {names_of_items()}),
        spec("dropItem", {names_of_items()}),
        spec("mineBlock", {names_of_blocks()}),
        spec("defendSelf", {}),
        spec("attackEntity", {{"spider", "zombie", "creeper"}}),
    };
    return all;
}

FunctionSpec described(std::string_view name, std::string description) {
    FunctionSpec s = builtin_function(name);
    s.description = std::move(description);
    return s;
}

}  // namespace

void Registry::add(FunctionSpec spec) {
    if (find(spec.name) != nullptr)
        throw std::invalid_argument("duplicate function " + spec.name + " in registry");
    specs_.push_back(std::move(spec));
}

const FunctionSpec* Registry::find(std::string_view name) const {
    auto it = std::find_if(specs_.begin(), specs_.end(),
                           [name](const FunctionSpec& s) { return s.name == name; });
    return it == specs_.end() ? nullptr : &*it;
}

FunctionSpec builtin_function(std::string_view name) {
    for (const FunctionSpec& s : catalog()) {
        if (s.name == name) return s;
    }
    throw std::invalid_argument("unknown function " + std::string(name));
}

const std::vector<std::string>& builtin_function_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const FunctionSpec& s : catalog()) v.push_back(s.name);
        return v;
    }();
    return names;
}

Registry elena_registry() {
    Registry r("Elena");
    r.add(described("goToPlayer", "Go to the player's location using 'goToPlayer'."));
    r.add(described("followPlayer", "Follow the player using 'followPlayer'."));
    r.add(described("pointToLocation", "Point to a specific location using 'pointToLocation'."));
    r.add(described("equipItem",
                    "Equip yourself with an item in your inventory using 'equipItem'."));
    r.add(described("dropItem", "Give the player an item in your inventory by using 'dropItem'."));
    r.add(described("mineBlock",
                    "Mine blocks (only cobblestone, dirt, stone and oak_log) by using 'mineBlock'."));
    return r;
}

Registry alaric_registry() {
    Registry r("Alaric");
    r.add(described("goToPlayer", "Go to the player's location using 'goToPlayer'."));
    r.add(described("followPlayer", "Follow the player using 'followPlayer'."));
    r.add(described("equipItem",
                    "Equip yourself with an item in your inventory using 'equipItem'."));
    r.add(described("dropItem", "Give the player an item in your inventory by using 'dropItem'."));
    r.add(described("mineBlock",
                    "Mine blocks (only cobblestone, dirt, stone and oak_log) by using 'mineBlock'."));
    // The two sentences below join into one.
    r.add(described("defendSelf", "Defend yourself from mobs using function 'defendSelf'"));
    r.add(described("attackEntity", "or attack them using 'attackEntity'."));
    return r;
}

std::string render_skill_section(const Registry& registry) {
    std::string out = "You can talk to the player directly.";
    if (registry.empty()) return out;
    out += " To execute your skills generate function calls.";
    for (const FunctionSpec& s : registry.specs()) {
        if (s.description.empty()) continue;
        out += ' ';
        out += s.description;
    }
    return out;
}

// --- dispatch -----------------------------------------------------------------

FunctionResult dispatch(const Registry& registry, World& world, const EntityId& actor,
                        const FunctionCall& call) {
    FunctionResult result{call, false, {}};
    const FunctionSpec* spec = registry.find(call.name);
    if (spec == nullptr) {
        result.text = "unknown function " + call.name;
        return result;
    }

    std::vector<std::string> args = call.arguments;
    // The prompt's call template is `'arguments': ['']`; models echo it for
    // argument-less calls.
    if (spec->arity == 0 && args.size() == 1 && args[0].empty()) args.clear();
    bool valid = static_cast<int>(args.size()) == spec->arity;
    for (std::size_t i = 0; valid && i < args.size(); ++i) {
        const auto& domain = spec->arg_domain[i];
        valid = std::find(domain.begin(), domain.end(), args[i]) != domain.end();
    }
    if (!valid) {
        result.text = "invalid arguments";
        return result;
    }

    ActionResult outcome;
    const std::string& name = spec->name;
    if (name == "goToPlayer") {
        outcome = world.go_to_player(actor);
    } else if (name == "followPlayer") {
        outcome = world.follow_player(actor);
    } else if (name == "pointToLocation") {
        outcome = world.point_to_location(actor, args[0]);
    } else if (name == "equipItem") {
        outcome = world.equip_item(actor, *parse_item_kind(args[0]));
    } else if (name == "dropItem") {
        outcome = world.drop_item(actor, *parse_item_kind(args[0]));
    } else if (name == "mineBlock") {
        outcome = world.mine_block(actor, *parse_block_kind(args[0]));
    } else if (name == "defendSelf") {
        outcome = world.defend_self(actor);
    } else if (name == "attackEntity") {
        outcome = world.attack_entity(actor, *parse_entity_kind(args[0]));
    } else {
        outcome = ActionResult::failure("unknown function " + name);
    }
    result.ok = outcome.ok;
    result.text = outcome.text.empty() ? (outcome.ok ? "ok" : "failed") : outcome.text;
    return result;
}

}  // namespace questforge
