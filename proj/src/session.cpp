#include "questforge/session.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace questforge {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 9> kVerbNames = {"say",    "move", "mine", "place", "attack",
                                                        "open",   "give", "wait", "sleep"};

json completion_json(const Completion& c) {
    json j = {{"phase", c.phase}, {"digest", c.digest}};
    if (c.reply) j["reply"] = *c.reply;
    if (c.error) {
        j["error"] = name_of(*c.error);
        j["message"] = c.error_message;
    }
    return j;
}

TapeEntry tape_entry(const json& c, std::int64_t seq) {
    TapeEntry e = TapeEntry::from_json(c);
    e.seq = seq;
    return e;
}

std::string text_field(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw std::invalid_argument(std::string("command needs string field '") + key + "'");
    return j.at(key).get<std::string>();
}

int count_field(const json& j, const char* key) {
    if (!j.contains(key)) return 1;
    if (!j.at(key).is_number_integer() || j.at(key).get<int>() < 1)
        throw std::invalid_argument(std::string("command field '") + key + "' must be a positive integer");
    return j.at(key).get<int>();
}

Direction direction_field(const json& j, bool allow_up) {
    const std::string text = text_field(j, "dir");
    const auto dir = parse_direction(text);
    if (!dir || (*dir == Direction::up && !allow_up)) throw std::invalid_argument("bad direction " + text);
    return *dir;
}

std::vector<std::string> split_words(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

}  // namespace

// --- commands -------------------------------------------------------------------

std::string_view name_of(Verb verb) { return kVerbNames[static_cast<std::size_t>(verb)]; }

std::optional<Verb> parse_verb(std::string_view text) {
    for (std::size_t i = 0; i < kVerbNames.size(); ++i)
        if (kVerbNames[i] == text) return static_cast<Verb>(i);
    return std::nullopt;
}

json Command::to_json() const {
    json j = {{"type", name_of(verb)}};
    switch (verb) {
        case Verb::say: j["text"] = text; break;
        case Verb::move:
            j["dir"] = name_of(dir);
            j["steps"] = count;
            break;
        case Verb::mine: j["block"] = target; break;
        case Verb::place:
            j["item"] = target;
            j["dir"] = name_of(dir);
            break;
        case Verb::attack: j["target"] = target; break;
        case Verb::give:
            j["to"] = to;
            j["item"] = target;
            break;
        case Verb::wait: j["ticks"] = count; break;
        case Verb::open:
        case Verb::sleep: break;
    }
    return j;
}

Command Command::from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("command must be a JSON object");
    const std::string type = text_field(j, "type");
    const auto verb = parse_verb(type);
    if (!verb) throw std::invalid_argument("unknown command " + type);
    Command c;
    c.verb = *verb;
    switch (c.verb) {
        case Verb::say: c.text = text_field(j, "text"); break;
        case Verb::move:
            c.dir = direction_field(j, false);
            c.count = count_field(j, "steps");
            break;
        case Verb::mine:
            c.target = text_field(j, "block");
            if (!parse_block_kind(c.target)) throw std::invalid_argument("unknown block " + c.target);
            break;
        case Verb::place:
            c.target = text_field(j, "item");
            if (!parse_item_kind(c.target)) throw std::invalid_argument("unknown item " + c.target);
            c.dir = direction_field(j, true);
            break;
        case Verb::attack: {
            c.target = text_field(j, "target");
            const auto kind = parse_entity_kind(c.target);
            if (!kind || !is_mob(*kind)) throw std::invalid_argument("unknown mob " + c.target);
            break;
        }
        case Verb::give:
            c.to = text_field(j, "to");
            c.target = text_field(j, "item");
            if (!parse_item_kind(c.target)) throw std::invalid_argument("unknown item " + c.target);
            break;
        case Verb::wait: c.count = count_field(j, "ticks"); break;
        case Verb::open:
        case Verb::sleep: break;
    }
    return c;
}

Command Command::parse_line(std::string_view line) {
    const std::vector<std::string> words = split_words(line);
    if (words.empty()) throw std::invalid_argument("empty command");
    json j = {{"type", words[0]}};
    auto need = [&](std::size_t n, const char* usage) {
        if (words.size() < n) throw std::invalid_argument(std::string("usage: ") + usage);
    };
    const auto verb = parse_verb(words[0]);
    if (!verb) throw std::invalid_argument("unknown command " + words[0]);
    auto number = [&](const std::string& w) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(w, &used);
            if (used == w.size()) return n;
        } catch (const std::exception&) {
        }
        throw std::invalid_argument("not a number: " + w);
    };
    switch (*verb) {
        case Verb::say: {
            const auto at = line.find("say");
            std::string text(line.substr(at + 3));
            text.erase(0, text.find_first_not_of(" \t"));
            if (text.empty()) throw std::invalid_argument("usage: say <text>");
            j["text"] = text;
            break;
        }
        case Verb::move:
            need(2, "move <north|south|east|west> [steps]");
            j["dir"] = words[1];
            if (words.size() > 2) j["steps"] = number(words[2]);
            break;
        case Verb::mine:
            need(2, "mine <block>");
            j["block"] = words[1];
            break;
        case Verb::place:
            need(3, "place <item> <direction>");
            j["item"] = words[1];
            j["dir"] = words[2];
            break;
        case Verb::attack:
            need(2, "attack <mob>");
            j["target"] = words[1];
            break;
        case Verb::give:
            need(3, "give <npc> <item>");
            j["to"] = words[1];
            j["item"] = words[2];
            break;
        case Verb::wait:
            if (words.size() > 1) j["ticks"] = number(words[1]);
            break;
        case Verb::open:
        case Verb::sleep: break;
    }
    return from_json(j);
}

std::vector<Command> load_commands(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open command file " + path.string());
    std::vector<Command> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(Command::from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

// --- records --------------------------------------------------------------------

std::string LogRecord::to_line() const {
    std::string out = "{\"session\":" + json(session).dump();
    out += ",\"seq\":" + std::to_string(seq);
    out += ",\"tick\":" + std::to_string(tick);
    out += ",\"kind\":" + json(kind).dump();
    out += ",\"actor\":" + json(actor).dump();
    out += ",\"payload\":" + payload.dump() + "}";
    return out;
}

LogRecord LogRecord::from_line(const std::string& line) {
    LogRecord r;
    try {
        const json j = json::parse(line);
        r.session = j.at("session").get<std::string>();
        r.seq = j.at("seq").get<std::int64_t>();
        r.tick = j.at("tick").get<std::int64_t>();
        r.kind = j.at("kind").get<std::string>();
        r.actor = j.at("actor").get<std::string>();
        r.payload = j.at("payload");
        if (!r.payload.is_object()) throw std::invalid_argument("payload must be an object");
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed log record: ") + e.what());
    }
    return r;
}

std::vector<LogRecord> read_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open log " + path.string());
    std::vector<LogRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            out.push_back(LogRecord::from_line(line));
        } catch (const std::exception& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

// --- session --------------------------------------------------------------------

void SessionConfig::validate() const {
    if (k < 1) throw std::invalid_argument("K must be at least 1");
    if (turn_budget < 1) throw std::invalid_argument("turn budget must be at least 1");
    if (tick_budget < 1) throw std::invalid_argument("tick budget must be at least 1");
}

Session::Session(SessionConfig config, std::shared_ptr<LlmBackend> backend,
                 std::optional<std::filesystem::path> log_path)
    : config_(std::move(config)), backend_(std::move(backend)), world_(World::create(config_.seed)) {
    config_.validate();
    if (config_.session_id.empty()) config_.session_id = "session-" + std::to_string(config_.seed);
    if (config_.npcs.empty()) {
        for (const EntityId& id : {kElenaId, kAlaricId}) config_.npcs.emplace(id, load_default_profile(id));
    }
    for (const auto& [id, profile] : config_.npcs) {
        if (world_.state().find(id) == nullptr) throw std::invalid_argument("no NPC " + id + " in the world");
        conversations_.emplace(id, ConversationState(profile, config_.k));
    }
    if (log_path) {
        sink_.emplace(*log_path, std::ios::trunc);
        if (!*sink_) throw std::runtime_error("cannot write log " + log_path->string());
    }

    json npcs = json::object();
    for (const auto& [id, profile] : config_.npcs) npcs[id] = profile.to_json();
    emit("session", "system",
         {{"event", "start"},
          {"seed", config_.seed},
          {"k", config_.k},
          {"turn_budget", config_.turn_budget},
          {"tick_budget", config_.tick_budget},
          {"npcs", std::move(npcs)}});
    emit_world_events(world_.drain_events());
}

LogRecord& Session::emit(std::string kind, std::string actor, json payload) {
    LogRecord r;
    r.session = config_.session_id;
    r.seq = static_cast<std::int64_t>(log_.size()) + 1;
    r.tick = world_.state().tick;
    r.kind = std::move(kind);
    r.actor = std::move(actor);
    r.payload = std::move(payload);
    if (sink_) *sink_ << r.to_line() << '\n' << std::flush;
    log_.push_back(std::move(r));
    return log_.back();
}

void Session::emit_world_events(std::vector<WorldEvent> events) {
    for (const WorldEvent& ev : events) {
        emit("world_event", "world", to_json(ev));
        emit_quest_steps(progress_.observe(ev, world_.state().tick));
    }
}

void Session::emit_quest_steps(const std::vector<QuestStep>& steps) {
    for (QuestStep s : steps)
        emit("quest_step", kPlayerId, {{"step", std::string(1, letter_of(s))}, {"name", name_of(s)}});
}

std::optional<EntityId> Session::listener() const {
    const Entity* player = world_.state().find(kPlayerId);
    if (player == nullptr || !player->alive()) return std::nullopt;
    const Entity* best = nullptr;
    for (const auto& [id, conv] : conversations_) {
        const Entity* npc = world_.state().find(id);
        if (npc == nullptr || !npc->alive() || !within(npc->position, player->position, kHearingRadius)) continue;
        if (best == nullptr) {
            best = npc;
            continue;
        }
        const int d = distance_sq(npc->position, player->position);
        const int bd = distance_sq(best->position, player->position);
        if (d < bd || (d == bd && npc->name < best->name)) best = npc;
    }
    if (best == nullptr) return std::nullopt;
    return best->id;
}

void Session::npc_turn(const EntityId& npc, const std::string& utterance) {
    ConversationState& conv = conversations_.at(npc);
    emit_world_events(world_.drain_events());
    const TurnReport report = take_npc_turn(conv, world_, utterance, *backend_, config_.params);

    for (std::size_t i = 0; i < report.calls.size(); ++i) {
        const std::string call_id = npc + "-" + std::to_string(report.exchange) + "-" + std::to_string(i + 1);
        emit("function_call", npc,
             {{"id", call_id}, {"name", report.calls[i].name}, {"arguments", report.calls[i].arguments}});
        emit("function_return", npc,
             {{"id", call_id}, {"ok", report.results[i].ok}, {"text", report.results[i].text}});
        emit_world_events(report.call_events[i]);
    }
    for (const std::string& w : report.warnings) emit("warning", npc, {{"text", w}});

    json completions = json::array();
    for (const Completion& c : report.completions) completions.push_back(completion_json(c));
    json payload = {{"to", kPlayerId},
                    {"text", report.reply},
                    {"exchange", report.exchange},
                    {"degraded", report.degraded},
                    {"completions", std::move(completions)}};
    if (!report.preface.empty()) payload["preface"] = report.preface;
    emit("utterance", npc, std::move(payload));
    emit_quest_steps(progress_.observe_exchange(npc, world_.state().tick));

    if (report.subgoal_completion) {
        const json completion = completion_json(*report.subgoal_completion);
        if (report.subgoal) {
            emit("subgoal", npc,
                 {{"text", "[Sub-goal] " + *report.subgoal},
                  {"subgoal", *report.subgoal},
                  {"exchange", report.exchange},
                  {"completion", completion}});
        } else {
            emit("warning", npc,
                 {{"text", report.subgoal_warning.value_or("sub-goal generation failed")},
                  {"exchange", report.exchange},
                  {"completion", completion}});
        }
    }
}

void Session::run_command(const Command& command, json& result) {
    ActionResult r = ActionResult::success("");
    auto item = [&] { return *parse_item_kind(command.target); };
    switch (command.verb) {
        case Verb::say:
            return;  // handled by apply
        case Verb::move: {
            int moved = 0;
            for (; moved < command.count; ++moved) {
                r = world_.walk(kPlayerId, command.dir);
                world_.tick();
                if (!r.ok) break;
            }
            if (r.ok) r.text = "moved " + std::string(name_of(command.dir)) + " " + std::to_string(moved);
            result["steps"] = moved;
            break;
        }
        case Verb::mine:
            r = world_.mine_block(kPlayerId, *parse_block_kind(command.target));
            world_.tick();
            break;
        case Verb::place:
            r = world_.place_block(kPlayerId, item(), command.dir);
            world_.tick();
            break;
        case Verb::attack:
            r = world_.attack_entity(kPlayerId, *parse_entity_kind(command.target));
            world_.tick();
            break;
        case Verb::open:
            r = world_.open_chest(kPlayerId);
            world_.tick();
            break;
        case Verb::give:
            r = world_.transfer_item(kPlayerId, command.to, item());
            world_.tick();
            break;
        case Verb::wait:
            for (int i = 0; i < command.count; ++i) world_.tick();
            r.text = "waited " + std::to_string(command.count);
            break;
        case Verb::sleep:
            r = world_.sleep(kPlayerId);
            world_.tick();
            break;
    }
    result["ok"] = r.ok;
    result["result"] = r.text;
}

std::vector<LogRecord> Session::apply(const Command& command) {
    if (finished()) throw std::logic_error("session has ended (" + *end_reason_ + ")");
    batch_start_ = log_.size();
    ++commands_;
    json payload = {{"command", command.to_json()}, {"n", commands_}};

    if (command.verb == Verb::say) {
        const auto npc = listener();
        payload["ok"] = npc.has_value();
        payload["result"] = npc ? "heard by " + conversations_.at(*npc).profile.name : "no one can hear you";
        emit("command", kPlayerId, std::move(payload));
        emit("utterance", kPlayerId, {{"to", npc ? json(*npc) : json(nullptr)}, {"text", command.text}});
        if (npc) {
            npc_turn(*npc, command.text);
        } else {
            emit("utterance", "system", {{"to", kPlayerId}, {"text", "no one can hear you"}});
        }
        world_.tick();
        emit_world_events(world_.drain_events());
    } else {
        run_command(command, payload);
        emit("command", kPlayerId, std::move(payload));
        emit_world_events(world_.drain_events());
    }
    check_end();
    return {log_.begin() + static_cast<std::ptrdiff_t>(batch_start_), log_.end()};
}

void Session::check_end() {
    const Entity* player = world_.state().find(kPlayerId);
    if (progress_.complete()) {
        finish("quest_complete");
    } else if (player == nullptr || !player->alive()) {
        finish("player_died");
    } else if (commands_ >= config_.turn_budget) {
        finish("turn_budget");
    } else if (world_.state().tick >= config_.tick_budget) {
        finish("tick_budget");
    }
}

std::vector<LogRecord> Session::finish(const std::string& reason) {
    if (finished()) return {};
    const std::size_t start = log_.size();
    end_reason_ = reason;
    emit("session", "system",
         {{"event", "end"},
          {"reason", reason},
          {"commands", commands_},
          {"progress", progress_.to_json()},
          {"world_digest", sha256_hex(world_.serialize())}});
    if (sink_) sink_->flush();
    return {log_.begin() + static_cast<std::ptrdiff_t>(start), log_.end()};
}

std::string Session::log_text() const {
    std::string out;
    for (const LogRecord& r : log_) out += r.to_line() + "\n";
    return out;
}

std::unique_ptr<Session> run_session(SessionConfig config, std::shared_ptr<LlmBackend> backend,
                                     const std::vector<Command>& commands,
                                     std::optional<std::filesystem::path> log_path) {
    auto session = std::make_unique<Session>(std::move(config), std::move(backend), std::move(log_path));
    for (const Command& c : commands) {
        if (session->finished()) break;
        session->apply(c);
    }
    session->finish("input_exhausted");
    return session;
}

// --- replay ---------------------------------------------------------------------

ReplayResult replay(const std::vector<LogRecord>& log, std::uint64_t fallback_seed) {
    ReplayResult out;
    if (log.empty()) {
        SessionConfig cfg;
        cfg.seed = fallback_seed;
        out.session = std::make_unique<Session>(std::move(cfg), std::make_shared<ReplayBackend>(std::vector<TapeEntry>{}));
        out.identical = true;
        return out;
    }

    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto expected = static_cast<std::int64_t>(i) + 1;
        if (log[i].seq != expected)
            throw ReplayFailure("seq gap: expected " + std::to_string(expected) + ", found " +
                                    std::to_string(log[i].seq),
                                log[i].seq);
    }
    const LogRecord& start = log.front();
    if (start.kind != "session" || start.payload.value("event", "") != "start")
        throw ReplayFailure("log does not begin with a session start record", start.seq);
    const LogRecord& end = log.back();
    if (end.kind != "session" || end.payload.value("event", "") != "end")
        throw ReplayFailure("log truncated after seq " + std::to_string(end.seq), end.seq);

    SessionConfig cfg;
    std::vector<TapeEntry> tape;
    std::vector<Command> commands;
    try {
        cfg.seed = start.payload.at("seed").get<std::uint64_t>();
        cfg.k = start.payload.at("k").get<int>();
        cfg.turn_budget = start.payload.at("turn_budget").get<int>();
        cfg.tick_budget = start.payload.at("tick_budget").get<std::int64_t>();
        cfg.session_id = start.session;
        for (const auto& [id, profile] : start.payload.at("npcs").items())
            cfg.npcs.emplace(id, NpcProfile::from_json(profile));
    } catch (const std::exception& e) {
        throw ReplayFailure(std::string("bad session start record: ") + e.what(), start.seq);
    }
    for (const LogRecord& r : log) {
        try {
            if (r.payload.contains("completions"))
                for (const json& c : r.payload.at("completions")) tape.push_back(tape_entry(c, r.seq));
            if (r.payload.contains("completion")) tape.push_back(tape_entry(r.payload.at("completion"), r.seq));
            if (r.kind == "command") commands.push_back(Command::from_json(r.payload.at("command")));
        } catch (const std::exception& e) {
            throw ReplayFailure(std::string("bad record: ") + e.what(), r.seq);
        }
    }

    out.session = std::make_unique<Session>(std::move(cfg), std::make_shared<ReplayBackend>(std::move(tape)));
    Session& s = *out.session;
    for (const Command& c : commands) {
        if (s.finished()) {
            const auto seq = s.log().back().seq;
            throw ReplayFailure("replayed session ended at seq " + std::to_string(seq) +
                                    " but the log has further commands",
                                seq);
        }
        try {
            s.apply(c);
        } catch (const ReplayError& e) {
            throw ReplayFailure(e.what(), e.seq());
        }
    }
    s.finish(end.payload.value("reason", "input_exhausted"));

    const auto& replayed = s.log();
    const std::size_t n = std::min(replayed.size(), log.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (replayed[i].to_line() != log[i].to_line()) {
            out.first_difference = log[i].seq;
            break;
        }
    }
    if (!out.first_difference && replayed.size() != log.size())
        out.first_difference = static_cast<std::int64_t>(n) + 1;
    out.identical = !out.first_difference;
    return out;
}

}  // namespace questforge
