// questforge: play, run, funnel, replay and serve LLM-driven NPC sessions.

#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "questforge/quest.hpp"
#include "questforge/remote_backend.hpp"
#include "questforge/server.hpp"
#include "questforge/session.hpp"

using namespace questforge;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct SessionFlags {
    std::uint64_t seed = 7;
    std::string backend = "remote";
    int k = 6;
    int turn_budget = 200;
    std::int64_t tick_budget = 5000;
    std::string log;
    std::string tape;
    std::string npc_dir;
    bool debug = false;
};

void add_session_flags(CLI::App* cmd, SessionFlags& f) {
    cmd->add_option("--seed", f.seed, "World seed")->capture_default_str();
    cmd->add_option("--backend", f.backend, "remote | scripted:<file> | replay:<tape>")->capture_default_str();
    cmd->add_option("--k", f.k, "Exchanges between sub-goals")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--turn-budget", f.turn_budget, "Maximum player commands")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tick-budget", f.tick_budget, "Maximum world ticks")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--log", f.log, "Session log (JSON Lines)");
    cmd->add_option("--tape", f.tape, "Also record every completion to this tape");
    cmd->add_option("--npc-dir", f.npc_dir, "Directory with elena.json and alaric.json");
    cmd->add_flag("--debug", f.debug, "Show sub-goals");
}

SessionConfig session_config(const SessionFlags& f) {
    SessionConfig cfg;
    cfg.seed = f.seed;
    cfg.k = f.k;
    cfg.turn_budget = f.turn_budget;
    cfg.tick_budget = f.tick_budget;
    if (!f.npc_dir.empty()) {
        for (const EntityId& id : {kElenaId, kAlaricId})
            cfg.npcs.emplace(id, NpcProfile::load(std::filesystem::path(f.npc_dir) / (id + ".json")));
    }
    return cfg;
}

std::shared_ptr<LlmBackend> backend_for(const SessionFlags& f) {
    auto backend = make_backend(f.backend);
    if (!f.tape.empty()) backend = std::make_shared<RecordingBackend>(backend, std::filesystem::path(f.tape));
    return backend;
}

std::optional<std::filesystem::path> log_path(const SessionFlags& f) {
    if (f.log.empty()) return std::nullopt;
    return std::filesystem::path(f.log);
}

void print_records(const Session& session, const std::vector<LogRecord>& records, bool debug) {
    for (const LogRecord& r : records) {
        if (r.kind == "utterance" && r.actor != kPlayerId) {
            const Entity* e = session.world().state().find(r.actor);
            const std::string who = e != nullptr ? e->name : r.actor;
            std::cout << who << ": " << r.payload.value("text", "") << '\n';
        } else if (r.kind == "function_return") {
            std::cout << "  [" << r.actor << " " << (r.payload.value("ok", false) ? "ok" : "failed") << "] "
                      << r.payload.value("text", "") << '\n';
        } else if (r.kind == "command" && r.payload.at("command").value("type", "") != "say") {
            std::cout << "  " << r.payload.value("result", "") << '\n';
        } else if (r.kind == "subgoal" && debug) {
            std::cout << r.payload.value("text", "") << '\n';
        } else if (r.kind == "quest_step") {
            std::cout << "* quest step (" << r.payload.value("step", "") << ") "
                      << r.payload.value("name", "") << " complete\n";
        } else if (r.kind == "session" && r.payload.value("event", "") == "end") {
            std::cout << "session ended: " << r.payload.value("reason", "") << '\n';
        }
    }
}

void print_summary(const Session& session) {
    const QuestProgress& p = session.progress();
    std::cout << "steps completed: " << p.completed_count() << "/" << kQuestSteps;
    if (p.failed()) std::cout << " (failed: Alaric died)";
    std::cout << "\nend: " << session.end_reason().value_or("open") << "\ncommands: " << session.commands()
              << "\nticks: " << session.world().state().tick << '\n';
}

int cmd_play(const SessionFlags& f) {
    Session session(session_config(f), backend_for(f), log_path(f));
    std::cout << "verbs: say <text> | move <dir> [n] | mine <block> | place <item> <dir> | attack <mob> | "
                 "open | give <npc> <item> | wait [n] | sleep | quit\n";
    std::string line;
    while (!session.finished()) {
        std::cout << "> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        if (line == "quit" || line == "exit") {
            print_records(session, session.finish("player_quit"), f.debug);
            break;
        }
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Command command;
        try {
            command = Command::parse_line(line);
        } catch (const std::exception& e) {
            std::cout << e.what() << '\n';
            continue;
        }
        print_records(session, session.apply(command), f.debug);
    }
    print_records(session, session.finish("input_exhausted"), f.debug);
    print_summary(session);
    return kExitOk;
}

int cmd_run(const SessionFlags& f, const std::string& player) {
    auto session = run_session(session_config(f), backend_for(f), load_commands(player), log_path(f));
    if (f.log.empty()) {
        std::cout << session->log_text();
    } else {
        print_summary(*session);
    }
    return kExitOk;
}

int cmd_funnel(const std::vector<std::string>& logs, bool as_json) {
    std::vector<std::filesystem::path> paths(logs.begin(), logs.end());
    std::sort(paths.begin(), paths.end());
    const FunnelReport report = funnel(paths);
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << '\n';
    if (as_json) {
        std::cout << report.to_json().dump(2) << '\n';
    } else {
        std::cout << report.to_text();
    }
    return kExitOk;
}

int cmd_replay(const std::string& log, bool verify) {
    const ReplayResult result = replay(read_log(log));
    if (verify) {
        if (!result.identical) {
            std::cerr << "replay diverges from " << log << " at seq " << *result.first_difference << '\n';
            return kExitRuntime;
        }
        std::cout << "verified: " << result.session->log().size() << " records identical\n";
        return kExitOk;
    }
    print_summary(*result.session);
    std::cout << "world digest: " << sha256_hex(result.session->world().serialize()) << '\n';
    if (!result.identical) std::cout << "note: replay differs from the log at seq " << *result.first_difference << '\n';
    return kExitOk;
}

Server* g_server = nullptr;

int cmd_serve(const SessionFlags& f, const std::string& host, unsigned short port, const std::string& log_dir) {
    make_backend(f.backend);  // fail fast on a bad spec
    ServerConfig cfg;
    cfg.host = host;
    cfg.port = port;
    cfg.seed = f.seed;
    cfg.k = f.k;
    cfg.turn_budget = f.turn_budget;
    cfg.tick_budget = f.tick_budget;
    cfg.debug = f.debug;
    if (!log_dir.empty()) {
        std::filesystem::create_directories(log_dir);
        cfg.log_dir = log_dir;
    }
    cfg.backend = [spec = f.backend] { return make_backend(spec); };
    std::unique_ptr<Server> server;
    try {
        server = std::make_unique<Server>(cfg);
    } catch (const std::system_error& e) {
        std::cerr << "cannot listen on " << host << ":" << port << ": " << e.what() << '\n';
        return kExitRuntime;
    }
    std::cout << "listening on " << host << ":" << server->port() << std::endl;
    g_server = server.get();
    std::signal(SIGINT, [](int) {
        if (g_server != nullptr) g_server->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_server != nullptr) g_server->stop();
    });
    server->run();
    g_server = nullptr;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LLM-driven NPC quest runtime"};
    app.require_subcommand(1);

    SessionFlags play_flags, run_flags, serve_flags;
    auto* play = app.add_subcommand("play", "Interactive session in the terminal");
    add_session_flags(play, play_flags);

    auto* run = app.add_subcommand("run", "Scripted session from a command file");
    add_session_flags(run, run_flags);
    std::string player;
    run->add_option("--player", player, "Player commands (JSON Lines)")->required()->check(CLI::ExistingFile);

    auto* funnel_cmd = app.add_subcommand("funnel", "Quest-completion funnel over session logs");
    std::vector<std::string> logs;
    bool as_json = false;
    funnel_cmd->add_option("logs", logs, "Session logs")->required();
    funnel_cmd->add_flag("--json", as_json, "Emit JSON");

    auto* replay_cmd = app.add_subcommand("replay", "Re-run a session log");
    std::string replay_log;
    bool verify = false;
    replay_cmd->add_option("log", replay_log, "Session log")->required()->check(CLI::ExistingFile);
    replay_cmd->add_flag("--verify", verify, "Exit 0 only if the rerun is byte-identical");

    auto* serve = app.add_subcommand("serve", "Session endpoint for the web client");
    add_session_flags(serve, serve_flags);
    std::string host = "127.0.0.1", log_dir;
    unsigned short port = 7777;
    serve->add_option("--port", port, "TCP port")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--log-dir", log_dir, "Write one log per connection here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*play) return cmd_play(play_flags);
        if (*run) return cmd_run(run_flags, player);
        if (*funnel_cmd) return cmd_funnel(logs, as_json);
        if (*replay_cmd) return cmd_replay(replay_log, verify);
        if (*serve) return cmd_serve(serve_flags, host, port, log_dir);
    } catch (const ReplayFailure& e) {
        std::cerr << "replay failed";
        if (e.seq()) std::cerr << " at seq " << *e.seq();
        std::cerr << ": " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
