#include "evoman/server.hpp"

#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "evoman/session.hpp"

namespace evoman::session {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using asio::awaitable;
using asio::use_awaitable;

class WsConnection : public std::enable_shared_from_this<WsConnection> {
public:
    WsConnection(websocket::stream<beast::tcp_stream> ws, SessionManager& manager)
        : ws_(std::move(ws)), connection_(manager), wake_(ws_.get_executor()), tick_(ws_.get_executor()) {
        wake_.expires_at(asio::steady_timer::time_point::max());
    }

    void start() {
        auto self = shared_from_this();
        asio::co_spawn(ws_.get_executor(), [self]() { return self->reader(); }, asio::detached);
        asio::co_spawn(ws_.get_executor(), [self]() { return self->writer(); }, asio::detached);
        asio::co_spawn(ws_.get_executor(), [self]() { return self->pumper(); }, asio::detached);
    }

private:
    void queue(std::vector<std::string> lines) {
        if (lines.empty()) return;
        for (auto& l : lines) outbox_.push_back(std::move(l));
        wake_.cancel();
    }

    void shut() {
        closed_ = true;
        wake_.cancel();
        tick_.cancel();
    }

    awaitable<void> reader() {
        beast::flat_buffer buffer;
        try {
            for (;;) {
                co_await ws_.async_read(buffer, use_awaitable);
                std::istringstream text(beast::buffers_to_string(buffer.data()));
                buffer.consume(buffer.size());
                std::string line;
                while (std::getline(text, line)) {
                    if (!line.empty() && line.back() == '\r') line.pop_back();
                    if (!line.empty()) queue(connection_.on_line(line));
                }
                tick_.cancel();  // a new realtime session may have started
            }
        } catch (const std::exception&) {
        }
        shut();
    }

    awaitable<void> pumper() {
        while (!closed_) {
            const auto deadline = connection_.next_deadline();
            tick_.expires_at(deadline ? *deadline : asio::steady_timer::clock_type::now() + std::chrono::hours(1));
            boost::system::error_code ec;
            co_await tick_.async_wait(asio::redirect_error(use_awaitable, ec));
            if (closed_) break;
            queue(connection_.pump());
        }
    }

    awaitable<void> writer() {
        try {
            for (;;) {
                while (!outbox_.empty()) {
                    ws_.text(true);
                    co_await ws_.async_write(asio::buffer(outbox_.front()), use_awaitable);
                    outbox_.pop_front();
                }
                if (closed_) break;
                wake_.expires_at(asio::steady_timer::time_point::max());
                boost::system::error_code ec;
                co_await wake_.async_wait(asio::redirect_error(use_awaitable, ec));
            }
        } catch (const std::exception&) {
            shut();
        }
    }

    websocket::stream<beast::tcp_stream> ws_;
    Connection connection_;
    asio::steady_timer wake_;
    asio::steady_timer tick_;
    std::deque<std::string> outbox_;
    bool closed_ = false;
};

std::string mime_type(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".html") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
}

http::response<http::string_body> static_response(const http::request<http::string_body>& req,
                                                  const std::filesystem::path& root) {
    http::response<http::string_body> res;
    res.version(req.version());
    res.keep_alive(false);
    std::string target(req.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target == "/") target = "/index.html";
    const bool safe = target.find("..") == std::string::npos;
    const auto file = root / target.substr(1);
    std::ifstream in(file, std::ios::binary);
    if (root.empty() || !safe || req.method() != http::verb::get || !in) {
        res.result(http::status::not_found);
        res.set(http::field::content_type, "text/plain");
        res.body() = "not found\n";
    } else {
        std::ostringstream body;
        body << in.rdbuf();
        res.result(http::status::ok);
        res.set(http::field::content_type, mime_type(file));
        res.body() = body.str();
    }
    res.prepare_payload();
    return res;
}

awaitable<void> handle(tcp::socket socket, SessionManager& manager, std::filesystem::path static_dir) {
    beast::tcp_stream stream(std::move(socket));
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    try {
        co_await http::async_read(stream, buffer, req, use_awaitable);
        if (websocket::is_upgrade(req)) {
            websocket::stream<beast::tcp_stream> ws(std::move(stream));
            ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
            co_await ws.async_accept(req, use_awaitable);
            std::make_shared<WsConnection>(std::move(ws), manager)->start();
            co_return;
        }
        auto res = static_response(req, static_dir);
        co_await http::async_write(stream, res, use_awaitable);
        stream.socket().shutdown(tcp::socket::shutdown_send);
    } catch (const std::exception&) {
    }
}

awaitable<void> listen(tcp::acceptor& acceptor, SessionManager& manager, std::filesystem::path static_dir) {
    for (;;) {
        boost::system::error_code ec;
        tcp::socket socket = co_await acceptor.async_accept(asio::redirect_error(use_awaitable, ec));
        if (ec) {
            if (ec == asio::error::operation_aborted) co_return;
            continue;
        }
        asio::co_spawn(acceptor.get_executor(), handle(std::move(socket), manager, static_dir), asio::detached);
    }
}

}  // namespace

ServerOptions parse_listen(const std::string& listen) {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos || colon == 0) throw std::invalid_argument("expected host:port, got '" + listen + "'");
    ServerOptions o;
    o.host = listen.substr(0, colon);
    const auto port = std::stoul(listen.substr(colon + 1));
    if (port > 65535) throw std::invalid_argument("port out of range");
    o.port = static_cast<std::uint16_t>(port);
    return o;
}

struct Server::Impl {
    explicit Impl(ServerOptions o)
        : options(std::move(o)), acceptor(io, tcp::endpoint(asio::ip::make_address(options.host), options.port)) {}

    ServerOptions options;
    asio::io_context io;
    tcp::acceptor acceptor;
    SessionManager manager;
    std::thread thread;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
    asio::co_spawn(impl_->io, listen(impl_->acceptor, impl_->manager, impl_->options.static_dir), asio::detached);
}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() { impl_->io.run(); }

void Server::start() {
    impl_->thread = std::thread([this] { impl_->io.run(); });
}

void Server::stop() {
    asio::post(impl_->io, [this] {
        boost::system::error_code ec;
        impl_->acceptor.close(ec);
    });
    impl_->io.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace evoman::session
