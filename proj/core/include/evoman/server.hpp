#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

namespace evoman::session {

struct ServerOptions {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    std::uint16_t port = 8765;
    /// Optional directory served over plain HTTP GET (the browser client).
    std::filesystem::path static_dir;
};

/// Parses "host:port". Throws std::invalid_argument.
ServerOptions parse_listen(const std::string& listen);

/// WebSocket front end of the session service: one Connection per socket, each outgoing
/// protocol line sent as one text message; incoming messages may hold several lines.
class Server {
public:
    explicit Server(ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Bound port (useful when the requested port was 0).
    std::uint16_t port() const;
    /// Serves until stop(); blocks the calling thread.
    void run();
    /// Serves on a background thread.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace evoman::session
