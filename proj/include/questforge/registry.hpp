#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "questforge/world.hpp"

namespace questforge {

/// One in-game function an NPC may call.
struct FunctionSpec {
    std::string name;
    int arity = 0;
    /// Legal values per argument position; arguments are validated by enumeration.
    std::vector<std::vector<std::string>> arg_domain;
    /// Skill sentence rendered into the prompt.
    std::string description;
};

struct FunctionCall {
    std::string name;
    std::vector<std::string> arguments;

    bool operator==(const FunctionCall&) const = default;
};

struct FunctionResult {
    FunctionCall call;
    bool ok = false;
    std::string text;  // exactly what is fed back to the model
};

/// A persona's curated function table. Names are unique; order is the order
/// the skills appear in the prompt.
class Registry {
public:
    Registry() = default;
    explicit Registry(std::string npc_name) : npc_name_(std::move(npc_name)) {}

    /// Throws std::invalid_argument on a duplicate name.
    void add(FunctionSpec spec);

    const std::string& npc_name() const { return npc_name_; }
    const std::vector<FunctionSpec>& specs() const { return specs_; }
    const FunctionSpec* find(std::string_view name) const;
    bool empty() const { return specs_.empty(); }

private:
    std::string npc_name_;
    std::vector<FunctionSpec> specs_;
};

/// Arity and argument domain of every function the world knows how to run,
/// with an empty description. Throws std::invalid_argument for unknown names.
FunctionSpec builtin_function(std::string_view name);
const std::vector<std::string>& builtin_function_names();

/// Registries with the default skill sentences.
Registry elena_registry();
Registry alaric_registry();

/// "You can talk to the player directly." followed by each skill sentence.
std::string render_skill_section(const Registry& registry);

// --- Parsing ----------------------------------------------------------------

struct ParseWarning {
    std::size_t offset = 0;  // byte offset of the offending block in the raw text
    std::string message;
};

struct ParsedOutput {
    std::string speech;
    std::vector<FunctionCall> calls;
    std::vector<ParseWarning> warnings;
};

/// Splits raw model output into speech and the calls of every
/// `Function: [...]` block. Accepts single- or double-quoted strings.
/// Malformed blocks are removed from the speech and reported as warnings.
/// Never throws.
ParsedOutput parse_npc_output(std::string_view raw);

/// `Function: [{'name':'mineBlock', 'arguments': ['oak_log']}]`
std::string format_call(const FunctionCall& call);
std::string format_calls(const std::vector<FunctionCall>& calls);

// --- Dispatch ---------------------------------------------------------------

/// Validates `call` against the registry and runs it in the world. Every
/// failure mode is an in-band result; unregistered or malformed calls never
/// touch the world.
FunctionResult dispatch(const Registry& registry, World& world, const EntityId& actor,
                        const FunctionCall& call);

}  // namespace questforge
