#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "questforge/session.hpp"

namespace questforge {

struct ServerConfig {
    std::string host = "127.0.0.1";
    unsigned short port = 7777;  // 0 picks a free port
    std::uint64_t seed = 7;
    int k = 6;
    int turn_budget = 200;
    std::int64_t tick_budget = 5000;
    bool debug = false;  // forward sub-goals as subgoal_notice
    std::optional<std::filesystem::path> log_dir;
    std::function<std::shared_ptr<LlmBackend>()> backend;
};

/// Session endpoint speaking newline-delimited JSON. Each connection gets
/// its own session and thread.
class Server {
public:
    /// Binds immediately; throws std::system_error when the port is taken.
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    unsigned short port() const;
    /// Accepts connections until stop().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Translates one client message into server messages. Exposed for tests;
/// `session` is created on hello.
class Connection {
public:
    Connection(const ServerConfig& config, std::string session_id, std::uint64_t default_seed);
    ~Connection();

    /// Handles one line and returns the lines to send back.
    std::vector<std::string> handle(const std::string& line);
    /// Ends the session (reason "disconnected") and flushes its log.
    void close();
    const Session* session() const { return session_.get(); }

private:
    std::vector<std::string> translate(const std::vector<LogRecord>& records, const nlohmann::json* command);

    const ServerConfig& config_;
    std::string session_id_;
    std::uint64_t default_seed_;
    std::unique_ptr<Session> session_;
};

}  // namespace questforge
