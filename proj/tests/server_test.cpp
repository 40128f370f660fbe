#include <gtest/gtest.h>

#include <fstream>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "evoman/neurocontroller.hpp"
#include "evoman/server.hpp"
#include "evoman/session.hpp"
#include "support.hpp"

namespace evoman::session {
namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace http = beast::http;
using tcp = boost::asio::ip::tcp;
using nlohmann::json;

class Client {
public:
    explicit Client(std::uint16_t port) : ws_(io_) {
        tcp::resolver resolver(io_);
        boost::asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.handshake("127.0.0.1", "/");
    }
    void send(const json& j) { ws_.write(boost::asio::buffer(j.dump())); }
    json receive() {
        beast::flat_buffer buf;
        ws_.read(buf);
        return json::parse(beast::buffers_to_string(buf.data()));
    }

private:
    boost::asio::io_context io_;
    websocket::stream<tcp::socket> ws_;
};

TEST(Server, ParseListen) {
    const auto o = parse_listen("0.0.0.0:9001");
    EXPECT_EQ(o.host, "0.0.0.0");
    EXPECT_EQ(o.port, 9001);
    EXPECT_THROW(parse_listen("nohost"), std::invalid_argument);
    EXPECT_THROW(parse_listen("h:99999"), std::invalid_argument);
}

TEST(Server, HeadlessMatchOverWebSocketMatchesTheInProcessStream) {
    evoman::testing::TempDir dir("server");
    std::vector<double> w(nn::fixed_genome_length, 0.0);
    w[nn::fixed_genome_length - 2] = 4;  // always shoot
    const auto genome = dir.path() / "g.json";
    nn::save_genome(genome, nn::neat_from_layer(w, 68, 5));

    SessionConfig cfg;
    cfg.mode = Mode::ai_vs_static;
    cfg.enemy_archetype = 5;
    cfg.player_genome = genome.string();
    cfg.seed = 11;
    cfg.tick_limit = 600;

    SessionManager local;
    Connection reference(local);
    std::vector<json> expected;
    for (const auto& line : reference.on_line(json{{"type", "open"}, {"config", to_json(cfg)}}.dump()))
        expected.push_back(json::parse(line));

    Server server({"127.0.0.1", 0, {}});
    server.start();
    Client client(server.port());
    client.send({{"type", "hello"}, {"format_version", 1}});
    EXPECT_EQ(client.receive()["type"], "hello");
    client.send({{"type", "open"}, {"format_version", 1}, {"config", to_json(cfg)}});
    std::vector<json> got;
    do got.push_back(client.receive());
    while (got.back()["type"] != "end" && got.back()["type"] != "error");
    EXPECT_EQ(got, expected);
    server.stop();
}

TEST(Server, RealtimeHumanSessionAcceptsInputs) {
    Server server({"127.0.0.1", 0, {}});
    server.start();
    Client client(server.port());
    SessionConfig cfg;
    cfg.mode = Mode::human_vs_static;
    cfg.pace = Pace::realtime_30tps;
    cfg.enemy_archetype = 2;
    cfg.tick_limit = 15;
    client.send({{"type", "open"}, {"config", to_json(cfg)}});
    const auto opened = client.receive();
    ASSERT_EQ(opened["type"], "opened");
    const std::string id = opened["session"];
    ActionSet right;
    right.right = true;
    client.send(to_json(InputMessage{id, 0, right}));
    int last_tick = -1;
    json m;
    do {
        m = client.receive();
        if (m["type"] == "frame") {
            EXPECT_EQ(m["tick"], last_tick + 1);
            last_tick = m["tick"];
        }
    } while (m["type"] != "end");
    EXPECT_EQ(last_tick, 15);
    EXPECT_EQ(m["duration"], 15);
    server.stop();
}

TEST(Server, ServesStaticFiles) {
    evoman::testing::TempDir dir("static");
    std::ofstream(dir.path() / "index.html") << "<h1>evoman</h1>";
    Server server({"127.0.0.1", 0, dir.path()});
    server.start();

    // one request per connection: the server answers with Connection: close
    auto get = [&](const std::string& target) {
        boost::asio::io_context io;
        beast::tcp_stream stream(io);
        stream.connect(tcp::endpoint(boost::asio::ip::make_address("127.0.0.1"), server.port()));
        http::request<http::empty_body> req{http::verb::get, target, 11};
        req.set(http::field::host, "localhost");
        http::write(stream, req);
        beast::flat_buffer buf;
        http::response<http::string_body> res;
        http::read(stream, buf, res);
        return res;
    };
    const auto ok = get("/");
    EXPECT_EQ(ok.result(), http::status::ok);
    EXPECT_EQ(ok.body(), "<h1>evoman</h1>");
    EXPECT_EQ(get("/nope.js").result(), http::status::not_found);
    EXPECT_NE(get("/../etc/passwd").result(), http::status::ok);
    server.stop();
}

}  // namespace
}  // namespace evoman::session
