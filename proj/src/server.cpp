#include "questforge/server.hpp"

#include <boost/asio.hpp>

#include <iostream>
#include <list>
#include <mutex>
#include <thread>

namespace questforge {

using nlohmann::json;
namespace asio = boost::asio;
using asio::ip::tcp;

namespace {

std::string error_line(const std::string& message) { return json{{"type", "error"}, {"message", message}}.dump(); }

}  // namespace

// --- Connection -----------------------------------------------------------------

Connection::Connection(const ServerConfig& config, std::string session_id, std::uint64_t default_seed)
    : config_(config), session_id_(std::move(session_id)), default_seed_(default_seed) {}

Connection::~Connection() { close(); }

void Connection::close() {
    if (session_) session_->finish("disconnected");
}

std::vector<std::string> Connection::handle(const std::string& line) {
    json msg = json::parse(line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object() || !msg.contains("type") || !msg.at("type").is_string())
        return {error_line("expected one JSON object with a \"type\" field per line")};
    const std::string type = msg.at("type").get<std::string>();

    if (type == "hello") {
        if (session_) return {error_line("session already started")};
        SessionConfig cfg;
        cfg.seed = default_seed_;
        if (msg.contains("seed")) {
            if (!msg.at("seed").is_number_unsigned()) return {error_line("seed must be a non-negative integer")};
            cfg.seed = msg.at("seed").get<std::uint64_t>();
        }
        cfg.k = config_.k;
        cfg.turn_budget = config_.turn_budget;
        cfg.tick_budget = config_.tick_budget;
        cfg.session_id = session_id_;
        std::optional<std::filesystem::path> log_path;
        if (config_.log_dir) log_path = *config_.log_dir / (session_id_ + ".jsonl");
        try {
            session_ = std::make_unique<Session>(std::move(cfg), config_.backend(), log_path);
        } catch (const std::exception& e) {
            return {error_line(std::string("cannot start session: ") + e.what())};
        }
        return {json{{"type", "world_delta"},
                     {"session", session_id_},
                     {"seed", session_->config().seed},
                     {"tick", session_->world().state().tick},
                     {"snapshot", session_->world().snapshot()}}
                    .dump(),
                json{{"type", "quest_progress"}, {"progress", session_->progress().to_json()}}.dump()};
    }

    if (!session_) return {error_line("send hello first")};
    if (session_->finished()) return {error_line("session has ended (" + *session_->end_reason() + ")")};
    Command command;
    try {
        command = Command::from_json(msg);
    } catch (const std::exception& e) {
        return {error_line(e.what())};
    }
    const json command_json = command.to_json();
    try {
        return translate(session_->apply(command), &command_json);
    } catch (const std::exception& e) {
        return {error_line(e.what())};
    }
}

std::vector<std::string> Connection::translate(const std::vector<LogRecord>& records, const json* command) {
    std::vector<std::string> out;
    json delta = {{"type", "world_delta"}, {"events", json::array()}};
    if (command != nullptr) delta["command"] = *command;
    const WorldState& state = session_->world().state();

    for (const LogRecord& r : records) {
        if (r.kind == "command") {
            delta["ok"] = r.payload.value("ok", true);
            delta["result"] = r.payload.value("result", "");
        } else if (r.kind == "world_event") {
            delta["events"].push_back(r.payload);
        } else if (r.kind == "utterance") {
            const Entity* speaker = state.find(r.actor);
            out.push_back(json{{"type", "utterance"},
                               {"speaker", r.actor},
                               {"name", speaker != nullptr ? speaker->name : r.actor},
                               {"to", r.payload.value("to", json(nullptr))},
                               {"text", r.payload.value("text", "")}}
                              .dump());
        } else if (r.kind == "quest_step") {
            out.push_back(json{{"type", "quest_progress"},
                               {"step", r.payload.at("step")},
                               {"name", r.payload.at("name")},
                               {"progress", session_->progress().to_json()}}
                              .dump());
        } else if (r.kind == "subgoal") {
            if (config_.debug)
                out.push_back(json{{"type", "subgoal_notice"}, {"npc", r.actor}, {"text", r.payload.at("text")}}.dump());
        } else if (r.kind == "session" && r.payload.value("event", "") == "end") {
            out.push_back(json{{"type", "quest_progress"},
                               {"progress", session_->progress().to_json()},
                               {"ended", r.payload.at("reason")}}
                              .dump());
        }
    }
    delta["tick"] = state.tick;
    const Entity* player = state.find(kPlayerId);
    if (player != nullptr) {
        json inv = json::object();
        for (const auto& [item, n] : player->inventory.entries()) inv[std::string(name_of(item))] = n;
        delta["player"] = {{"position", {player->position.x, player->position.y, player->position.z}},
                           {"health", player->health},
                           {"inventory", std::move(inv)}};
    }
    out.insert(out.begin(), delta.dump());
    return out;
}

// --- Server ---------------------------------------------------------------------

struct Server::Impl {
    ServerConfig config;
    asio::io_context io;
    tcp::acceptor acceptor{io};
    std::mutex mutex;
    std::list<std::thread> workers;
    std::list<std::shared_ptr<tcp::socket>> sockets;
    std::uint64_t connections = 0;
    bool stopping = false;

    void accept() {
        auto socket = std::make_shared<tcp::socket>(io);
        acceptor.async_accept(*socket, [this, socket](const boost::system::error_code& ec) {
            if (ec) return;
            std::lock_guard lock(mutex);
            if (stopping) return;
            const std::uint64_t n = connections++;
            sockets.push_back(socket);
            workers.emplace_back([this, socket, n] { serve(socket, n); });
            accept();
        });
    }

    void serve(const std::shared_ptr<tcp::socket>& socket, std::uint64_t n) {
        Connection conn(config, "serve-" + std::to_string(n), config.seed + n);
        asio::streambuf buffer;
        boost::system::error_code ec;
        for (;;) {
            asio::read_until(*socket, buffer, '\n', ec);
            if (ec) break;
            std::istream in(&buffer);
            std::string line;
            std::getline(in, line);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::string reply;
            for (const std::string& l : conn.handle(line)) reply += l + "\n";
            asio::write(*socket, asio::buffer(reply), ec);
            if (ec) break;
        }
        conn.close();
        std::lock_guard lock(mutex);
        sockets.remove(socket);
    }
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    if (!impl_->config.backend) throw std::invalid_argument("server needs a backend factory");
    try {
        const tcp::endpoint endpoint(asio::ip::make_address(impl_->config.host), impl_->config.port);
        impl_->acceptor.open(endpoint.protocol());
        impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
        impl_->acceptor.bind(endpoint);
        impl_->acceptor.listen();
    } catch (const boost::system::system_error& e) {
        throw std::system_error(e.code().value(), std::generic_category(), e.what());
    }
}

Server::~Server() {
    stop();
    std::list<std::thread> workers;
    {
        std::lock_guard lock(impl_->mutex);
        workers.swap(impl_->workers);
    }
    for (std::thread& t : workers)
        if (t.joinable()) t.join();
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
    impl_->accept();
    impl_->io.run();
}

void Server::stop() {
    std::lock_guard lock(impl_->mutex);
    if (impl_->stopping) return;
    impl_->stopping = true;
    asio::post(impl_->io, [impl = impl_.get()] {
        boost::system::error_code ignored;
        impl->acceptor.close(ignored);
    });
    for (auto& s : impl_->sockets) {
        boost::system::error_code ignored;
        s->shutdown(tcp::socket::shutdown_both, ignored);
    }
}

}  // namespace questforge
