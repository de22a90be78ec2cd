#include "questforge/npc.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace questforge {

using nlohmann::json;

namespace {

std::string trimmed(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string npc_line(const std::string& speech, const std::vector<FunctionCall>& calls) {
    if (calls.empty()) return speech;
    if (speech.empty()) return format_calls(calls);
    return speech + " " + format_calls(calls);
}

// Messages for one turn. An npc turn that acted expands to its act line, the
// results it saw, and the reply.
void append_turn(std::vector<PromptMessage>& out, const ConversationTurn& turn) {
    switch (turn.speaker) {
        case Speaker::player:
            out.push_back({Role::player, turn.text});
            break;
        case Speaker::npc:
            if (!turn.calls.empty()) {
                out.push_back({Role::npc, npc_line(turn.preface, turn.calls)});
                for (const FunctionResult& r : turn.results) out.push_back({Role::function_return, r.text});
            }
            out.push_back({Role::npc, turn.text});
            break;
        case Speaker::system:
            out.push_back({Role::system, turn.text});
            break;
    }
}

std::string required_text(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw std::invalid_argument(std::string("profile field '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

Completion completion_for(const std::string& phase, const PromptDocument& doc) {
    Completion c;
    c.phase = phase;
    c.digest = doc.digest();
    return c;
}

}  // namespace

// --- profiles -------------------------------------------------------------------

void NpcProfile::validate() const {
    const std::pair<const char*, const std::string*> sections[] = {
        {"id", &id},
        {"name", &name},
        {"game_setting", &game_setting},
        {"opening_story", &opening_story},
        {"persona", &persona},
        {"backstory", &backstory},
        {"main_goal", &main_goal},
        {"scene", &scene},
    };
    for (const auto& [key, text] : sections) {
        if (trimmed(*text).empty()) throw std::invalid_argument("profile " + name + ": empty " + key);
    }
    if (constraints.empty()) throw std::invalid_argument("profile " + name + ": no constraints");
    for (const std::string& c : constraints)
        if (trimmed(c).empty()) throw std::invalid_argument("profile " + name + ": empty constraint");
    const bool no_invention = std::any_of(constraints.begin(), constraints.end(), [](const std::string& c) {
        return c.find("Do not invent new NPCs") != std::string::npos;
    });
    if (!no_invention)
        throw std::invalid_argument("profile " + name + ": missing 'Do not invent new NPCs' constraint");
    if (call_examples.empty() || return_examples.empty())
        throw std::invalid_argument("profile " + name + ": few-shot examples are required");
    for (const FewShotCall& ex : call_examples) {
        const ParsedOutput parsed = parse_npc_output(ex.function);
        if (!parsed.warnings.empty() || parsed.calls.empty())
            throw std::invalid_argument("profile " + name + ": malformed few-shot call " + ex.function);
        for (const FunctionCall& call : parsed.calls) {
            if (registry.find(call.name) == nullptr)
                throw std::invalid_argument("profile " + name + ": few-shot uses " + call.name +
                                            " outside the registry");
        }
    }
}

NpcProfile NpcProfile::from_json(const json& j) {
    NpcProfile p;
    try {
        p.id = required_text(j, "id");
        p.name = required_text(j, "name");
        p.game_setting = required_text(j, "game_setting");
        p.opening_story = required_text(j, "opening_story");
        p.persona = required_text(j, "persona");
        p.backstory = required_text(j, "backstory");
        p.main_goal = required_text(j, "main_goal");
        p.scene = required_text(j, "scene");
        p.registry = Registry(p.name);
        for (const json& s : j.at("skills")) {
            FunctionSpec spec = builtin_function(s.at("name").get<std::string>());
            spec.description = s.value("description", "");
            p.registry.add(std::move(spec));
        }
        const json& shots = j.at("few_shots");
        for (const json& c : shots.at("calls"))
            p.call_examples.push_back({c.at("player").get<std::string>(), c.at("function").get<std::string>()});
        for (const json& r : shots.at("returns"))
            p.return_examples.push_back({r.at("returns").get<std::string>(), r.at("reply").get<std::string>()});
        p.constraints = j.at("constraints").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed profile: ") + e.what());
    }
    p.validate();
    return p;
}

json NpcProfile::to_json() const {
    json skills = json::array();
    for (const FunctionSpec& s : registry.specs()) skills.push_back({{"name", s.name}, {"description", s.description}});
    json calls = json::array();
    for (const FewShotCall& c : call_examples) calls.push_back({{"player", c.player}, {"function", c.function}});
    json returns = json::array();
    for (const FewShotReturn& r : return_examples) returns.push_back({{"returns", r.returns}, {"reply", r.reply}});
    return {{"id", id},
            {"name", name},
            {"game_setting", game_setting},
            {"opening_story", opening_story},
            {"persona", persona},
            {"backstory", backstory},
            {"main_goal", main_goal},
            {"skills", std::move(skills)},
            {"few_shots", {{"calls", std::move(calls)}, {"returns", std::move(returns)}}},
            {"constraints", constraints},
            {"scene", scene}};
}

NpcProfile NpcProfile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("profile " + path.string() + " is not JSON: " + e.what());
    }
    return from_json(j);
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("QUESTFORGE_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return QUESTFORGE_DATA_DIR;
}

NpcProfile load_default_profile(const std::string& id) {
    return NpcProfile::load(default_data_dir() / "npcs" / (id + ".json"));
}

// --- prompts --------------------------------------------------------------------

std::string render_profile_block(const NpcProfile& p) {
    std::string out = p.game_setting;
    out += "\n\nOpening Story: " + p.opening_story;
    out += "\n\nPersona: " + p.persona;
    out += "\n\nBackstory: " + p.backstory;
    out += "\n\nMain goal: " + p.main_goal;
    out += "\n\nYour skills: " + render_skill_section(p.registry);
    out += "\n\nBelow are some examples of function calls:";
    for (std::size_t i = 0; i < p.call_examples.size(); ++i) {
        out += "\nExample " + std::to_string(i + 1) + ":";
        out += "\nPlayer: " + p.call_examples[i].player;
        out += "\n" + p.call_examples[i].function;
    }
    out += "\n\nBelow are some examples of text response for function returns:";
    for (std::size_t i = 0; i < p.return_examples.size(); ++i) {
        out += "\nExample " + std::to_string(i + 1) + ":";
        out += "\nFunction_Returns: " + p.return_examples[i].returns;
        out += "\n" + p.name + ": " + p.return_examples[i].reply;
    }
    out += "\n\nIMPORTANT: Follow these constraints when you respond to the player:";
    for (const std::string& c : p.constraints) out += "\n" + c;
    out += "\n\nScene: " + p.scene;
    return out;
}

PromptDocument assemble_prompt(const ConversationState& state, const PendingAction& pending) {
    PromptDocument doc;
    doc.agent = state.profile.name;
    doc.messages.push_back({Role::system, render_profile_block(state.profile)});

    const std::size_t n = state.turns.size();
    const std::size_t first = n > kHistoryWindow ? n - kHistoryWindow : 0;
    for (std::size_t i = first; i < n; ++i) append_turn(doc.messages, state.turns[i]);

    if (!pending.calls.empty()) doc.messages.push_back({Role::npc, npc_line(pending.speech, pending.calls)});
    for (const FunctionResult& r : pending.results) doc.messages.push_back({Role::function_return, r.text});

    if (state.active_subgoal) doc.messages.push_back({Role::system, "[Sub-goal] " + *state.active_subgoal});
    return doc;
}

PromptDocument assemble_prompt(const ConversationState& state,
                               const std::vector<FunctionResult>& pending_results) {
    PendingAction pending;
    pending.results = pending_results;
    return assemble_prompt(state, pending);
}

PromptDocument assemble_subgoal_prompt(const ConversationState& state) {
    PromptDocument doc;
    doc.agent = state.profile.name;
    doc.messages.push_back({Role::system, "You are " + state.profile.name +
                                              ", an NPC in a Minecraft game.\nMain goal: " +
                                              state.profile.main_goal});

    // Walk back to the start of the K-th most recent exchange.
    std::size_t start = state.turns.size();
    int exchanges = 0;
    while (start > 0 && exchanges < state.k) {
        --start;
        if (state.turns[start].speaker == Speaker::player) ++exchanges;
    }
    for (std::size_t i = start; i < state.turns.size(); ++i) append_turn(doc.messages, state.turns[i]);

    doc.messages.push_back(
        {Role::system, "Generate a single-sentence sub-goal for " + state.profile.name +
                           " that keeps the conversation with the player aligned with the main goal. "
                           "Reply with the sub-goal only."});
    return doc;
}

// --- turns ----------------------------------------------------------------------

std::optional<std::string> generate_subgoal(ConversationState& state, LlmBackend& backend,
                                            const CompletionParams& params, Completion& record,
                                            std::vector<std::string>& warnings) {
    const PromptDocument doc = assemble_subgoal_prompt(state);
    record = completion_for("subgoal", doc);
    std::string raw;
    try {
        raw = backend.complete(doc, params);
    } catch (const LlmError& e) {
        record.error = e.kind();
        record.error_message = e.what();
        warnings.push_back("sub-goal generation failed (" + std::string(name_of(e.kind())) + "): " + e.what());
        return std::nullopt;
    }
    record.reply = raw;
    std::string text = trimmed(raw);
    if (text.rfind("[Sub-goal]", 0) == 0) text = trimmed(std::string_view(text).substr(10));
    text = trimmed(text.substr(0, text.find('\n')));
    if (text.empty()) {
        warnings.emplace_back("sub-goal generation returned no text");
        return std::nullopt;
    }
    state.active_subgoal = text;
    return text;
}

TurnReport take_npc_turn(ConversationState& state, World& world, const std::string& utterance,
                         LlmBackend& backend, const CompletionParams& params) {
    TurnReport report;
    const NpcProfile& profile = state.profile;

    ConversationTurn player_turn;
    player_turn.index = static_cast<int>(state.turns.size()) + 1;
    player_turn.speaker = Speaker::player;
    player_turn.text = utterance;
    state.turns.push_back(player_turn);

    ConversationTurn npc_turn;
    npc_turn.speaker = Speaker::npc;

    auto ask = [&](const std::string& phase, const PromptDocument& doc) -> std::optional<std::string> {
        Completion c = completion_for(phase, doc);
        try {
            std::string raw = backend.complete(doc, params);
            c.reply = raw;
            report.completions.push_back(std::move(c));
            return raw;
        } catch (const LlmError& e) {
            c.error = e.kind();
            c.error_message = e.what();
            report.completions.push_back(std::move(c));
            report.warnings.push_back("backend " + std::string(name_of(e.kind())) + " error: " + e.what());
            return std::nullopt;
        }
    };

    const std::optional<std::string> first = ask("act", assemble_prompt(state));
    if (!first) {
        report.degraded = true;
        report.reply = std::string(kDegradedReply);
    } else {
        ParsedOutput parsed = parse_npc_output(*first);
        for (const ParseWarning& w : parsed.warnings) report.warnings.push_back(w.message);

        PendingAction pending;
        pending.speech = parsed.speech;
        pending.calls = parsed.calls;
        for (const FunctionCall& call : parsed.calls) {
            pending.results.push_back(dispatch(profile.registry, world, profile.id, call));
            report.call_events.push_back(world.drain_events());
        }

        if (pending.results.empty()) {
            report.reply = parsed.speech;
        } else {
            report.preface = parsed.speech;
            const std::optional<std::string> second = ask("speak", assemble_prompt(state, pending));
            if (!second) {
                report.degraded = true;
                report.reply = std::string(kDegradedReply);
            } else {
                ParsedOutput spoken = parse_npc_output(*second);
                for (const ParseWarning& w : spoken.warnings) report.warnings.push_back(w.message);
                if (!spoken.calls.empty())
                    report.warnings.push_back("ignored " + std::to_string(spoken.calls.size()) +
                                              " function call(s) in the follow-up reply");
                report.reply = spoken.speech;
            }
        }
        report.calls = std::move(pending.calls);
        report.results = std::move(pending.results);
    }

    npc_turn.index = static_cast<int>(state.turns.size()) + 1;
    npc_turn.text = report.reply;
    npc_turn.preface = report.preface;
    npc_turn.calls = report.calls;
    npc_turn.results = report.results;
    npc_turn.degraded = report.degraded;
    state.turns.push_back(std::move(npc_turn));

    report.exchange = ++state.exchange_count;
    if (state.k > 0 && state.exchange_count % state.k == 0) {
        Completion record;
        std::vector<std::string> subgoal_warnings;
        report.subgoal = generate_subgoal(state, backend, params, record, subgoal_warnings);
        if (!subgoal_warnings.empty()) report.subgoal_warning = subgoal_warnings.front();
        report.subgoal_completion = std::move(record);
        if (report.subgoal) state.turns.back().subgoal = report.subgoal;
    }
    return report;
}

}  // namespace questforge
